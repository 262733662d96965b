#include <catch2/catch_amalgamated.hpp>
TEST_CASE("test_regression placeholder") { CHECK(true); }
