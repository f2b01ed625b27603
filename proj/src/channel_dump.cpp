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

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "thz/channel.hpp"
#include "thz/csv.hpp"
#include "thz/errors.hpp"

namespace thz {

namespace {

constexpr std::array<char, 8> magic = {'T', 'H', 'Z', 'C', 'H', '0', '0', '1'};

template <typename T>
void write_raw(std::ofstream& out, const T& value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in)
{
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in)
        throw ValueError("truncated channel dump");
    return value;
}

} // namespace

void dump_channel(const ChannelRealization& ch, const SystemConfig& cfg, const std::string& prefix)
{
    CsvWriter paths({"user", "path", "is_los", "cluster", "ray", "aoa_rad", "aod_rad", "delay_s",
                     "path_length_m", "phase_rad"});
    for (std::size_t u = 0; u < ch.paths.size(); ++u) {
        for (std::size_t p = 0; p < ch.paths[u].size(); ++p) {
            const auto& path = ch.paths[u][p];
            paths.row({csv_int(static_cast<long long>(u)), csv_int(static_cast<long long>(p)),
                       csv_int(path.is_los ? 1 : 0), csv_int(path.cluster), csv_int(path.ray),
                       csv_double(path.aoa_rad), csv_double(path.aod_rad), csv_double(path.delay_s),
                       csv_double(path.path_length_m), csv_double(path.phase_rad)});
        }
    }
    paths.write_file(prefix + ".paths.csv");

    std::ofstream out(prefix + ".bin", std::ios::binary);
    if (!out)
        throw ValueError("cannot write '" + prefix + ".bin'");
    out.write(magic.data(), magic.size());
    write_raw(out, static_cast<std::uint32_t>(ch.num_users()));
    write_raw(out, static_cast<std::uint32_t>(ch.num_bins()));
    write_raw(out, static_cast<std::uint32_t>(cfg.bs_antennas));
    write_raw(out, static_cast<std::uint32_t>(cfg.tx_antennas_per_user));
    for (const auto& user : ch.freq) {
        for (const auto& h : user) {
            for (Eigen::Index c = 0; c < h.cols(); ++c) {
                for (Eigen::Index r = 0; r < h.rows(); ++r) {
                    write_raw(out, h(r, c).real());
                    write_raw(out, h(r, c).imag());
                }
            }
        }
    }
}

ChannelRealization read_channel_dump(const SystemConfig& cfg, const std::string& prefix)
{
    std::ifstream in(prefix + ".bin", std::ios::binary);
    if (!in)
        throw ValueError("cannot open '" + prefix + ".bin'");
    std::array<char, 8> head{};
    in.read(head.data(), head.size());
    if (!in || head != magic)
        throw ValueError("'" + prefix + ".bin' is not a channel dump");
    const auto users = read_raw<std::uint32_t>(in);
    const auto bins = read_raw<std::uint32_t>(in);
    const auto rows = read_raw<std::uint32_t>(in);
    const auto cols = read_raw<std::uint32_t>(in);
    if (static_cast<int>(users) != cfg.num_users || static_cast<int>(bins) != cfg.num_bins ||
        static_cast<int>(rows) != cfg.bs_antennas || static_cast<int>(cols) != cfg.tx_antennas_per_user)
        throw ShapeMismatch("channel dump dimensions do not match the config");

    ChannelRealization ch;
    ch.freq.assign(users, std::vector<CMatrix>(bins, CMatrix(rows, cols)));
    for (auto& user : ch.freq) {
        for (auto& h : user) {
            for (Eigen::Index c = 0; c < h.cols(); ++c) {
                for (Eigen::Index r = 0; r < h.rows(); ++r) {
                    const double re = read_raw<double>(in);
                    const double im = read_raw<double>(in);
                    h(r, c) = Complex(re, im);
                }
            }
        }
    }
    ch.taps.resize(users);
    for (std::uint32_t u = 0; u < users; ++u)
        ch.taps[u] = idft_sequence(std::span<const CMatrix>(ch.freq[u]), bins);
    ch.mu.assign(bins, CMatrix(rows, cfg.total_tx_antennas()));
    for (std::uint32_t k = 0; k < bins; ++k) {
        for (std::uint32_t u = 0; u < users; ++u)
            ch.mu[k].middleCols(u * cols, cols) = ch.freq[u][k];
    }

    const auto table = read_csv_file(prefix + ".paths.csv");
    ch.paths.assign(users, {});
    for (const auto& rec : table.rows) {
        PathParams p;
        const auto user = std::stoul(rec.at(table.column("user")));
        if (user >= users)
            throw ValueError("path row references an unknown user");
        p.is_los = rec.at(table.column("is_los")) == "1";
        p.cluster = std::stoi(rec.at(table.column("cluster")));
        p.ray = std::stoi(rec.at(table.column("ray")));
        p.aoa_rad = std::stod(rec.at(table.column("aoa_rad")));
        p.aod_rad = std::stod(rec.at(table.column("aod_rad")));
        p.delay_s = std::stod(rec.at(table.column("delay_s")));
        p.path_length_m = std::stod(rec.at(table.column("path_length_m")));
        p.phase_rad = std::stod(rec.at(table.column("phase_rad")));
        ch.paths[user].push_back(p);
    }
    return ch;
}

} // namespace thz
