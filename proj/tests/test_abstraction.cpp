#include "doctest.h"

TEST_CASE("placeholder abstraction") { CHECK(true); }
