#include "doctest.h"

#include "momc/cli.hpp"
