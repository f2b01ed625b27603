// Copyright 2026 The thzsim Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace thz {

// Every library error carries a stable kind name; the CLI prints it in its
// machine-readable error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define THZ_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& what) : Error(#Name, what) {} \
    }

THZ_DEFINE_ERROR(ValueError);
THZ_DEFINE_ERROR(DivisibilityError);
THZ_DEFINE_ERROR(DimensionError);
THZ_DEFINE_ERROR(LengthMismatch);
THZ_DEFINE_ERROR(ShapeMismatch);
THZ_DEFINE_ERROR(ConvergenceFailure);
THZ_DEFINE_ERROR(NotPositiveDefinite);
THZ_DEFINE_ERROR(IndexError);
THZ_DEFINE_ERROR(DelayOutOfRange);
THZ_DEFINE_ERROR(UnsupportedResolution);
THZ_DEFINE_ERROR(GridTooSmall);
THZ_DEFINE_ERROR(SingularGram);
THZ_DEFINE_ERROR(SingularNoise);
THZ_DEFINE_ERROR(ConfigParseError);
THZ_DEFINE_ERROR(PlanError);

#undef THZ_DEFINE_ERROR

} // namespace thz
