// Copyright 2026 The Interaction Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INTERLAB_INTERLAB_HPP
#define INTERLAB_INTERLAB_HPP

#include "interlab/attack.hpp"
#include "interlab/dataset.hpp"
#include "interlab/error.hpp"
#include "interlab/game.hpp"
#include "interlab/interaction.hpp"
#include "interlab/io.hpp"
#include "interlab/mlp.hpp"
#include "interlab/modulation.hpp"
#include "interlab/parallel.hpp"
#include "interlab/rng.hpp"
#include "interlab/subset.hpp"
#include "interlab/theory.hpp"
#include "interlab/train.hpp"

#endif  // INTERLAB_INTERLAB_HPP
