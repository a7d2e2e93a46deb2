// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Umbrella header: the whole toolkit in one include.

#include "degrade.hpp"
#include "element.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "field_io.hpp"
#include "image_io.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"
#include "render.hpp"
#include "solver.hpp"
#include "space.hpp"
#include "vec.hpp"
