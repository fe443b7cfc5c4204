// Copyright 2026 The bornbench Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * On-disk formats for models and training traces.
 *
 * Every writer is a pure function of its input, so identical runs produce
 * identical bytes. Wall-clock timings are deliberately left out.
 */
#pragma once

#include "bornbench/born.hpp"
#include "bornbench/rbm.hpp"
#include "bornbench/trainers.hpp"

#include <iosfwd>
#include <string>
#include <variant>

namespace bornbench {

std::string born_model_json(const BornMachine &machine);
std::string rbm_model_json(const RbmModel &model);

using StoredModel = std::variant<BornMachine, RbmModel>;

/// Parses output of born_model_json or rbm_model_json.
StoredModel parse_model_json(const std::string &text);

/**
 * @brief Header line, then one JSON object per epoch record.
 *
 * Header: {"type":"header","model","cost","trainable_parameters",
 * "root_seed","epochs"}. Records: {"type":"epoch","epoch","cost",
 * "discriminator_error" (null when not evaluated),"converged","seed",
 * "params" (only on snapshot epochs)}.
 */
void write_trace_ndjson(std::ostream &out, const TrainingTrace &trace);
TrainingTrace read_trace_ndjson(std::istream &in);

/// `epoch,cost,discriminator_error`; the error column is empty when absent.
void write_metrics_csv(std::ostream &out, const TrainingTrace &trace);

} // namespace bornbench
