// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "l0s/experiments.hpp"
#include "l0s/hvs_reference.hpp"
#include "l0s/kernels.hpp"
#include "l0s/metrics.hpp"
#include "l0s/quadrature.hpp"
#include "l0s/ray_pdf.hpp"
#include "l0s/rng.hpp"
#include "l0s/scenes.hpp"
#include "l0s/version.hpp"
