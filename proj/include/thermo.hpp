#ifndef THERMO_HPP
#define THERMO_HPP

#include "thermo/errors.hpp"
#include "thermo/markov_model.hpp"
#include "thermo/potential.hpp"
#include "thermo/parallel.hpp"
#include "thermo/pressure.hpp"
#include "thermo/spectrum.hpp"
#include "thermo/empirics.hpp"
#include "thermo/io.hpp"

#endif  // THERMO_HPP
