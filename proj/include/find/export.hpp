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
//
// Normalized magnitude views of selected records: one CSV per preamble field
// (|IQ| over time, per channel) and one for |CSI| over the subcarriers.
// Every series is divided by its own maximum, so plots peak at 1.0.

#pragma once

#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "find/dataset.hpp"
#include "find/errors.hpp"
#include "find/numerology.hpp"
#include "find/record.hpp"

namespace find {

struct ExportResult {
    std::vector<std::string> files;
    std::vector<std::string> warnings; // e.g. all-zero series left unnormalized
};

namespace detail {

inline const char* field_file_tag(FieldId id)
{
    switch (id) {
    case FieldId::l_stf: return "l_stf";
    case FieldId::l_ltf: return "l_ltf";
    case FieldId::l_sig: return "l_sig";
    case FieldId::vht_sig_a: return "vht_sig_a";
    case FieldId::vht_stf: return "vht_stf";
    case FieldId::vht_ltf: return "vht_ltf";
    case FieldId::vht_sig_b: return "vht_sig_b";
    }
    return "field";
}

inline std::string format_csv_value(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// Magnitudes normalized to a 1.0 peak; an all-zero series stays zero and is
// reported through `warnings`.
inline std::vector<std::vector<double>> normalized_magnitudes(const std::vector<cvec>& channels,
                                                              const std::string& what,
                                                              std::vector<std::string>& warnings)
{
    std::vector<std::vector<double>> out;
    for (std::size_t m = 0; m < channels.size(); ++m) {
        std::vector<double> mag(channels[m].size());
        double peak = 0.0;
        for (std::size_t i = 0; i < mag.size(); ++i) {
            mag[i] = std::abs(channels[m][i]);
            peak = std::max(peak, mag[i]);
        }
        if (peak > 0.0) {
            for (auto& v : mag)
                v /= peak;
        } else {
            warnings.push_back(what + " channel " + std::to_string(m) + ": all-zero series");
        }
        out.push_back(std::move(mag));
    }
    return out;
}

inline void write_csv(const std::string& path, const std::string& index_name,
                      const std::vector<double>& index,
                      const std::vector<std::vector<double>>& series, ExportResult& result)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw io_error("cannot open CSV for writing: " + path);
    f << index_name;
    for (std::size_t m = 0; m < series.size(); ++m)
        f << ",ch" << m;
    f << "\n";
    for (std::size_t i = 0; i < index.size(); ++i) {
        f << format_csv_value(index[i]);
        for (const auto& s : series)
            f << ',' << format_csv_value(s[i]);
        f << "\n";
    }
    result.files.push_back(path);
}

} // namespace detail

inline ExportResult export_views(const std::string& dataset_path,
                                 const std::vector<std::uint64_t>& record_ids,
                                 const std::string& out_prefix, const OfdmNumerology& num = {})
{
    DatasetReader reader(dataset_path);
    std::set<std::uint64_t> wanted(record_ids.begin(), record_ids.end());
    ExportResult result;

    while (!wanted.empty()) {
        auto rec = reader.next();
        if (!rec)
            break;
        if (!wanted.erase(rec->id))
            continue;
        const std::string base = out_prefix + "record" + std::to_string(rec->id) + "_";

        for (std::size_t f = 0; f < n_preamble_fields; ++f) {
            const auto& block = rec->fields.blocks[f];
            if (block.empty())
                continue;
            const auto id = static_cast<FieldId>(f);
            const auto mags = detail::normalized_magnitudes(
                block, std::string(field_name(id)) + " view", result.warnings);
            std::vector<double> index(block.front().size());
            for (std::size_t i = 0; i < index.size(); ++i)
                index[i] = static_cast<double>(i);
            detail::write_csv(base + detail::field_file_tag(id) + ".csv", "sample", index, mags,
                              result);
        }

        std::vector<cvec> csi_cols(rec->csi.n_channels, cvec(CsiMatrix::n_subcarriers));
        for (std::size_t m = 0; m < rec->csi.n_channels; ++m)
            for (std::size_t k = 0; k < CsiMatrix::n_subcarriers; ++k)
                csi_cols[m][k] = rec->csi.at(k, m);
        const auto mags = detail::normalized_magnitudes(csi_cols, "CSI view", result.warnings);
        const auto subcarriers = num.used_subcarriers();
        std::vector<double> index(subcarriers.begin(), subcarriers.end());
        detail::write_csv(base + "csi.csv", "subcarrier", index, mags, result);
    }

    if (!wanted.empty())
        throw config_error("export_views: record id " + std::to_string(*wanted.begin()) +
                           " not present in dataset");
    return result;
}

} // namespace find
