#include "doctest.h"

TEST_CASE("placeholder rational") { CHECK(true); }
