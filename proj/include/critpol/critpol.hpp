#pragma once

#include "critpol/core/hilbert.hpp"
#include "critpol/dispersive.hpp"
#include "critpol/dynamics/experiments.hpp"
#include "critpol/dynamics/jaynes_cummings.hpp"
#include "critpol/dynamics/lindblad.hpp"
#include "critpol/errors.hpp"
#include "critpol/meanfield.hpp"
#include "critpol/polariton.hpp"
