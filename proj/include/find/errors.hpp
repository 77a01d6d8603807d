// SPDX-License-Identifier: Apache-2.0
//
// find: software receive chain, calibration and DoA toolkit for
// multi-channel 802.11ac baseband captures
// Copyright (C) 2026 The find authors
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

namespace find {

// Invalid configuration or parameters (bad numerology, empty path list, ...).
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// An index or window falls outside the addressed sample range.
class bounds_error : public std::out_of_range {
public:
    explicit bounds_error(const std::string& msg) : std::out_of_range(msg) {}
};

// A frame or file ends before an expected structure is complete.
class truncation_error : public std::runtime_error {
public:
    explicit truncation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Record contents disagree with the container header.
class schema_error : public std::runtime_error {
public:
    explicit schema_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Byte stream is not a recognized container (bad magic, garbled structure).
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Container version newer than this implementation supports.
class version_error : public std::runtime_error {
public:
    explicit version_error(const std::string& msg) : std::runtime_error(msg) {}
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// CSI too weak on the reference channel to measure phase against.
class low_signal_error : public std::runtime_error {
public:
    explicit low_signal_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Fewer measurement groups than the statistic requires.
class insufficient_data_error : public std::runtime_error {
public:
    explicit insufficient_data_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace find
