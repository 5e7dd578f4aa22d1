// SPDX-License-Identifier: Apache-2.0
//
// mimosim - massive MIMO link and signaling simulation library
// Copyright (C) 2026 The mimosim authors
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
//
// Plain-text hierarchical configuration: one `key = value` pair per line,
// nesting through dotted keys, `#` comments. Errors name the offending key.

#ifndef mimosim_config_H
#define mimosim_config_H

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace mimosim
{
    class config_error : public std::runtime_error
    {
    public:
        explicit config_error(const std::string& what) : std::runtime_error(what) {}
    };

    class config_map
    {
    public:
        config_map() = default;

        static config_map parse(const std::string& text);

        // canonical form: keys sorted, `key = value` lines
        std::string serialize() const;

        // FNV-1a over the canonical serialization
        std::uint64_t hash() const;

        bool has(const std::string& key) const { return values_.count(key) > 0; }
        void set(const std::string& key, const std::string& value);

        std::string get_string(const std::string& key, const std::string& fallback) const;
        std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
        double get_f64(const std::string& key, double fallback) const;
        bool get_bool(const std::string& key, bool fallback) const;

        const std::map<std::string, std::string>& values() const { return values_; }

    private:
        std::map<std::string, std::string> values_;
    };

} // namespace mimosim

#endif
