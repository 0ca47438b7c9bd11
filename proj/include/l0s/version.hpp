// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#define L0S_VERSION_MAJOR 1
#define L0S_VERSION_MINOR 0
#define L0S_VERSION_PATCH 0
#define L0S_VERSION_STRING "1.0.0"

namespace l0s {

inline constexpr const char* version() { return L0S_VERSION_STRING; }

}  // namespace l0s
