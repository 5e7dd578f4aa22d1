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

#include "mimosim/config.hpp"

#include <cctype>
#include <sstream>

namespace mimosim
{
    namespace
    {
        std::string trim(const std::string& s)
        {
            std::size_t a = 0, b = s.size();
            while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
                ++a;
            while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
                --b;
            return s.substr(a, b - a);
        }

        bool valid_key(const std::string& key)
        {
            if (key.empty() || key.front() == '.' || key.back() == '.')
                return false;
            for (char c : key)
                if (!(std::islower(static_cast<unsigned char>(c)) ||
                      std::isdigit(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
                      c == '-'))
                    return false;
            return true;
        }
    } // namespace

    config_map config_map::parse(const std::string& text)
    {
        config_map out;
        std::istringstream is(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(is, line))
        {
            ++line_no;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped.front() == '#')
                continue;
            const std::size_t eq = stripped.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(line_no) +
                                   ": expected `key = value`, got: " + stripped);
            const std::string key = trim(stripped.substr(0, eq));
            const std::string value = trim(stripped.substr(eq + 1));
            if (!valid_key(key))
                throw config_error("config line " + std::to_string(line_no) + ": bad key `" +
                                   key + "`");
            if (value.empty())
                throw config_error("config: empty value for key `" + key + "`");
            if (out.values_.count(key))
                throw config_error("config: duplicate key `" + key + "`");
            out.values_[key] = value;
        }
        return out;
    }

    std::string config_map::serialize() const
    {
        std::ostringstream os;
        for (const auto& [key, value] : values_)
            os << key << " = " << value << '\n';
        return os.str();
    }

    std::uint64_t config_map::hash() const
    {
        const std::string canon = serialize();
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (unsigned char c : canon)
        {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
        return h;
    }

    void config_map::set(const std::string& key, const std::string& value)
    {
        if (!valid_key(key))
            throw config_error("config: bad key `" + key + "`");
        values_[key] = value;
    }

    std::string config_map::get_string(const std::string& key, const std::string& fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    std::uint64_t config_map::get_u64(const std::string& key, std::uint64_t fallback) const
    {
        auto it = values_.find(key);
        if (it == values_.end())
            return fallback;
        try
        {
            std::size_t used = 0;
            if (it->second.front() == '-')
                throw std::invalid_argument("negative");
            const std::uint64_t v = std::stoull(it->second, &used);
            if (used != it->second.size())
                throw std::invalid_argument("trailing");
            return v;
        }
        catch (const std::exception&)
        {
            throw config_error("config: key `" + key + "` expects a non-negative integer, got `" +
                               it->second + "`");
        }
    }

    double config_map::get_f64(const std::string& key, double fallback) const
    {
        auto it = values_.find(key);
        if (it == values_.end())
            return fallback;
        try
        {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size())
                throw std::invalid_argument("trailing");
            return v;
        }
        catch (const std::exception&)
        {
            throw config_error("config: key `" + key + "` expects a number, got `" + it->second +
                               "`");
        }
    }

    bool config_map::get_bool(const std::string& key, bool fallback) const
    {
        auto it = values_.find(key);
        if (it == values_.end())
            return fallback;
        if (it->second == "true" || it->second == "1")
            return true;
        if (it->second == "false" || it->second == "0")
            return false;
        throw config_error("config: key `" + key + "` expects true/false, got `" + it->second +
                           "`");
    }

} // namespace mimosim
