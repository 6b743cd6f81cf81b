//
// Copyright 2026 The dpvb Authors
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
//

#pragma once

#include "dpvb/distributions.hpp"
#include "dpvb/estimators.hpp"
#include "dpvb/experiment.hpp"
#include "dpvb/io.hpp"
#include "dpvb/model.hpp"
#include "dpvb/privacy.hpp"
#include "dpvb/rng.hpp"
#include "dpvb/simplex_opt.hpp"
#include "dpvb/special.hpp"
#include "dpvb/table.hpp"
#include "dpvb/vb.hpp"
