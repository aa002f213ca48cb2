// Copyright 2026 The descjudge Authors
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

#pragma once

#include "descjudge/analytics.hpp"
#include "descjudge/cassette.hpp"
#include "descjudge/corpus.hpp"
#include "descjudge/embedding.hpp"
#include "descjudge/errors.hpp"
#include "descjudge/gateway.hpp"
#include "descjudge/mock.hpp"
#include "descjudge/pipeline.hpp"
#include "descjudge/prompts.hpp"
#include "descjudge/questiongen.hpp"
#include "descjudge/report.hpp"
#include "descjudge/results.hpp"
#include "descjudge/scoring.hpp"
#include "descjudge/similarity.hpp"
#include "descjudge/transport.hpp"
