#include "doctest.h"

TEST_CASE("placeholder lqr") { CHECK(true); }
