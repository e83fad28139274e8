// placeholder
#include <doctest.h>
