#pragma once

#include "dynsamp/core.hpp"
#include "dynsamp/space.hpp"
#include "dynsamp/semigroup.hpp"
#include "dynsamp/quadrature.hpp"
#include "dynsamp/forcing.hpp"
#include "dynsamp/solver.hpp"
#include "dynsamp/sampling.hpp"
#include "dynsamp/detector.hpp"
#include "dynsamp/bounds.hpp"
#include "dynsamp/experiment.hpp"
#include "dynsamp/config.hpp"
#include "dynsamp/report.hpp"
