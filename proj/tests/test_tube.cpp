#include "doctest.h"

TEST_CASE("placeholder tube") { CHECK(true); }
