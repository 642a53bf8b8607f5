// Copyright 2026 The mpjc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef MPJC_MPJC_HPP
#define MPJC_MPJC_HPP

#include "mpjc/dynamics.hpp"
#include "mpjc/error.hpp"
#include "mpjc/model.hpp"
#include "mpjc/observables.hpp"
#include "mpjc/ode.hpp"
#include "mpjc/parallel.hpp"
#include "mpjc/tensor.hpp"
#include "mpjc/trajectories.hpp"

#endif  // MPJC_MPJC_HPP
