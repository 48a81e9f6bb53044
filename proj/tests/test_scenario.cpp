#include "doctest.h"

TEST_CASE("placeholder scenario") { CHECK(true); }
