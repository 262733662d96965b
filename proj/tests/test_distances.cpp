#include <catch2/catch_amalgamated.hpp>
TEST_CASE("test_distances placeholder") { CHECK(true); }
