#pragma once

#include "maxreg/error.hpp"
#include "maxreg/parallel.hpp"
#include "maxreg/lattice.hpp"
#include "maxreg/averaging.hpp"
#include "maxreg/maxops.hpp"
#include "maxreg/sobolev.hpp"
#include "maxreg/generators.hpp"
#include "maxreg/verify.hpp"
#include "maxreg/io.hpp"
#include "maxreg/config.hpp"
