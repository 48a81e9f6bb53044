#include "doctest.h"

TEST_CASE("placeholder navigator") { CHECK(true); }
