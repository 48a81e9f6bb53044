#include "doctest.h"

TEST_CASE("placeholder geometry") { CHECK(true); }
