#include "doctest.h"

TEST_CASE("placeholder mitl") { CHECK(true); }
