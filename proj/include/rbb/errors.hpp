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

#ifndef RBB_ERRORS_HPP
#define RBB_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbb
{
    // Bad shapes, counts, or parameter values supplied by the caller.
    class invalid_argument : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Evaluation requested outside the domain an object was built for.
    class out_of_domain : public std::out_of_range
    {
    public:
        using std::out_of_range::out_of_range;
    };

    // Eigensolver failure, non-finite intermediate values.
    class numeric_failure : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // A least-squares system (or a requested truncation) exceeds the numerical rank.
    class rank_deficiency : public std::runtime_error
    {
    public:
        rank_deficiency(const std::string &what, std::size_t rank, std::size_t required)
            : std::runtime_error(what + " (numerical rank " + std::to_string(rank) + " < " + std::to_string(required) + ")"),
              rank_(rank), required_(required) {}

        std::size_t rank() const noexcept { return rank_; }
        std::size_t required() const noexcept { return required_; }

    private:
        std::size_t rank_;
        std::size_t required_;
    };

    // The bilinear solver produced a zero factor.
    class degenerate_solution : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // No usable scale could be matched against the angle codebook.
    class disambiguation_failure : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

} // namespace rbb

#endif
