#pragma once

#include "ponder/config.hpp"
#include "ponder/dynamics.hpp"
#include "ponder/entanglement.hpp"
#include "ponder/errors.hpp"
#include "ponder/model.hpp"
#include "ponder/oracle.hpp"
#include "ponder/readout.hpp"
#include "ponder/sweep.hpp"
