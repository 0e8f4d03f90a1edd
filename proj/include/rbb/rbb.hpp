// SPDX-License-Identifier: Apache-2.0
//
// rbb: robust broadband beamforming via bilinear least squares
// Copyright (C) 2026 The rbb authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RBB_RBB_HPP
#define RBB_RBB_HPP

#include "rbb/baselines.hpp"
#include "rbb/bilinear.hpp"
#include "rbb/cache.hpp"
#include "rbb/embedding.hpp"
#include "rbb/errors.hpp"
#include "rbb/forward.hpp"
#include "rbb/geometry.hpp"
#include "rbb/linalg.hpp"
#include "rbb/simulate.hpp"
#include "rbb/slepian.hpp"

#endif
