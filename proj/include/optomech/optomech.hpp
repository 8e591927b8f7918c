#pragma once

#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/csv.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/errors.hpp"
#include "optomech/hybrid.hpp"
#include "optomech/linalg.hpp"
#include "optomech/meanfield.hpp"
#include "optomech/observables.hpp"
#include "optomech/params.hpp"
#include "optomech/sweep.hpp"
