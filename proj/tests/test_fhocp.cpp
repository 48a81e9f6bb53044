#include "doctest.h"

TEST_CASE("placeholder fhocp") { CHECK(true); }
