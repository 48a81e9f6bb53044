#include "doctest.h"

TEST_CASE("placeholder dynamics") { CHECK(true); }
