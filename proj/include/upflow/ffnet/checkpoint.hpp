// Copyright 2026 The UpFlow Authors.
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

#include <iosfwd>
#include <string>

#include "upflow/ffnet/network.hpp"

namespace upflow::ffnet {

/// FFN1 container: config, then every parameter and batch-norm statistic as a
/// named tensor with explicit rows/cols and little-endian float32 payload.
void save_checkpoint(Network& net, std::ostream& out);
void save_checkpoint(Network& net, const std::string& path);
Network load_checkpoint(std::istream& in);
Network load_checkpoint(const std::string& path);

}  // namespace upflow::ffnet
