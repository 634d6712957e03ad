#pragma once

// Convenience umbrella header.

#include "hyperadapt/adapter.hpp"
#include "hyperadapt/config.hpp"
#include "hyperadapt/grad.hpp"
#include "hyperadapt/gradcheck.hpp"
#include "hyperadapt/poincare.hpp"
#include "hyperadapt/report.hpp"
#include "hyperadapt/rng.hpp"
#include "hyperadapt/scaling.hpp"
#include "hyperadapt/tensor_io.hpp"
#include "hyperadapt/toy.hpp"
#include "hyperadapt/verify.hpp"
#include "hyperadapt/version.hpp"
