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

#include <stdexcept>
#include <string>

namespace upflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define UPFLOW_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& what) : Error(what) {}     \
    }

UPFLOW_DEFINE_ERROR(InvalidArgument);
UPFLOW_DEFINE_ERROR(GridMismatch);
UPFLOW_DEFINE_ERROR(EmptyNeighborhood);
UPFLOW_DEFINE_ERROR(SolverDiverged);
UPFLOW_DEFINE_ERROR(CgNotConverged);
UPFLOW_DEFINE_ERROR(NoSurface);
UPFLOW_DEFINE_ERROR(CenterMismatch);
UPFLOW_DEFINE_ERROR(LengthMismatch);
UPFLOW_DEFINE_ERROR(NonFiniteLoss);
UPFLOW_DEFINE_ERROR(FormatError);

#undef UPFLOW_DEFINE_ERROR

}  // namespace upflow
