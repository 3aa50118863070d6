#include <doctest.h>

TEST_SUITE("smoothing") {}
