// Copyright 2026 The actid Authors
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
//
// Self-describing text serialization of zoo models: a kind tag, structural
// metadata (shape, normalizer, fixed gains), then the flattened parameters,
// one value per line. Decimal encoding is shortest-round-trip, so
// save -> load is bit-exact.

#ifndef ACTID_MODEL_IO_HPP_
#define ACTID_MODEL_IO_HPP_

#include <filesystem>

#include "actid/actuators.hpp"

namespace actid {

void save_model(const std::filesystem::path& path, const ActuatorModel& model);
ActuatorModel load_model(const std::filesystem::path& path);

}  // namespace actid

#endif  // ACTID_MODEL_IO_HPP_
