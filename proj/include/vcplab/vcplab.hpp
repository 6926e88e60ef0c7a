#pragma once

#include "vcplab/config.hpp"
#include "vcplab/linalg.hpp"
#include "vcplab/densesim.hpp"
#include "vcplab/pauli.hpp"
#include "vcplab/gadgets.hpp"
#include "vcplab/codes.hpp"
#include "vcplab/detectors.hpp"
#include "vcplab/metrics.hpp"
#include "vcplab/budget.hpp"
#include "vcplab/circuits.hpp"
#include "vcplab/montecarlo.hpp"
#include "vcplab/csv.hpp"
#include "vcplab/parallel.hpp"
#include "vcplab/experiments.hpp"
#include "vcplab/validation.hpp"
