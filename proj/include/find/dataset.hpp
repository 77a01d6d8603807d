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
// Dataset container v1, little-endian throughout.
//
// Header:  magic "FINDDSv1" (8) | u32 version | f64 carrier_hz |
//          f64 sample_rate_hz | u8 n_channels | u16 n_subcarriers |
//          n_channels x 3 f64 element positions (m) |
//          u16 label length + UTF-8 environment label | u64 record_count
// Record:  u64 id | f64 timestamp | f32 true_azimuth_deg (NaN = untracked) |
//          u16 + UTF-8 position label | n_channels x f32 snr_db |
//          f64 cfo_hz | f32 detection_metric |
//          CSI: n_subcarriers x n_channels x (f32 re, f32 im), subcarrier-major |
//          7 fields, each: u8 field id, u32 n_samples,
//          n_channels x n_samples x (f32 re, f32 im), channel-major.
//
// Writing is streaming (one record buffered at a time); record_count is
// patched into the header when the writer is finalized. Reading is a lazy
// per-record iteration, so memory stays independent of the record count.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "find/errors.hpp"
#include "find/record.hpp"

namespace find {

inline constexpr std::array<std::uint8_t, 8> dataset_magic = {0x46, 0x49, 0x4E, 0x44,
                                                              0x44, 0x53, 0x76, 0x31}; // "FINDDSv1"
inline constexpr std::uint32_t dataset_version = 1;
inline constexpr std::uint32_t canonical_nan_f32 = 0x7FC00000u;

struct DatasetHeader {
    std::uint32_t version = dataset_version;
    double carrier_hz = 2.412e9;
    double sample_rate_hz = 80e6;
    std::uint8_t n_channels = 4;
    std::uint16_t n_subcarriers = 242;
    std::vector<std::array<double, 3>> element_positions; // meters, one per channel
    std::string environment_label;
    std::uint64_t record_count = 0;

    void validate() const
    {
        if (version == 1 && n_subcarriers != 242)
            throw schema_error("dataset header: version 1 requires 242 subcarriers");
        if (element_positions.size() != n_channels)
            throw schema_error("dataset header: element positions must match channel count");
        if (environment_label.size() > std::numeric_limits<std::uint16_t>::max())
            throw schema_error("dataset header: environment label too long");
    }
};

namespace bytes {

inline void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

inline void put_u16(std::string& out, std::uint16_t v)
{
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Cursor {
public:
    Cursor(const char* data, std::size_t size) : data_(data), size_(size) {}

    std::size_t remaining() const { return size_ - pos_; }

    void need(std::size_t n) const
    {
        if (pos_ + n > size_)
            throw truncation_error("unexpected end of data");
    }

    std::uint8_t u8()
    {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }

    std::uint16_t u16()
    {
        need(2);
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i)
            v |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(data_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
        pos_ += 8;
        return v;
    }

    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string str(std::size_t n)
    {
        need(n);
        std::string s(data_ + pos_, n);
        pos_ += n;
        return s;
    }

private:
    const char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

} // namespace bytes

inline std::uint64_t dataset_header_size(const DatasetHeader& h)
{
    return 8 + 4 + 8 + 8 + 1 + 2 + static_cast<std::uint64_t>(h.n_channels) * 24 + 2 +
           h.environment_label.size() + 8;
}

inline std::uint64_t dataset_record_size(const DatasetHeader& h, const FrameRecord& r)
{
    std::uint64_t size = 8 + 8 + 4 + 2 + r.position_label.size() +
                         static_cast<std::uint64_t>(h.n_channels) * 4 + 8 + 4 +
                         static_cast<std::uint64_t>(h.n_subcarriers) * h.n_channels * 8;
    for (const auto& field : r.fields.blocks) {
        const std::uint64_t n = field.empty() ? 0 : field.front().size();
        size += 1 + 4 + static_cast<std::uint64_t>(h.n_channels) * n * 8;
    }
    return size;
}

namespace detail {

inline void check_record_shape(const DatasetHeader& h, const FrameRecord& r)
{
    const std::string tag = "record " + std::to_string(r.id);
    if (r.csi.n_channels != h.n_channels || !r.csi.well_formed() ||
        h.n_subcarriers != CsiMatrix::n_subcarriers)
        throw schema_error(tag + ": CSI shape does not match header");
    if (r.snr_db.size() != h.n_channels)
        throw schema_error(tag + ": SNR entries must match channel count");
    if (r.position_label.size() > std::numeric_limits<std::uint16_t>::max())
        throw schema_error(tag + ": position label too long");
    for (std::size_t f = 0; f < n_preamble_fields; ++f) {
        const auto& field = r.fields.blocks[f];
        if (field.empty())
            continue;
        if (field.size() != h.n_channels)
            throw schema_error(tag + ": field channel count does not match header");
        for (const auto& ch : field)
            if (ch.size() != field.front().size())
                throw schema_error(tag + ": field channels must share one length");
    }
}

inline void encode_record(std::string& out, const DatasetHeader& h, const FrameRecord& r)
{
    using namespace bytes;
    put_u64(out, r.id);
    put_f64(out, r.timestamp_s);
    if (r.true_azimuth_deg)
        put_f32(out, static_cast<float>(*r.true_azimuth_deg));
    else
        put_u32(out, canonical_nan_f32);
    put_u16(out, static_cast<std::uint16_t>(r.position_label.size()));
    out.append(r.position_label);
    for (std::size_t m = 0; m < h.n_channels; ++m)
        put_f32(out, m < r.snr_db.size() ? r.snr_db[m] : 0.0f);
    put_f64(out, r.cfo_hz);
    put_f32(out, r.detection_metric);
    for (std::size_t k = 0; k < h.n_subcarriers; ++k) {
        for (std::size_t m = 0; m < h.n_channels; ++m) {
            const cplx v = r.csi.at(k, m);
            put_f32(out, static_cast<float>(v.real()));
            put_f32(out, static_cast<float>(v.imag()));
        }
    }
    for (std::size_t f = 0; f < n_preamble_fields; ++f) {
        const auto& field = r.fields.blocks[f];
        const std::uint32_t n = field.empty() ? 0u : static_cast<std::uint32_t>(field.front().size());
        put_u8(out, static_cast<std::uint8_t>(f));
        put_u32(out, n);
        for (std::size_t m = 0; m < h.n_channels && n > 0; ++m) {
            for (std::uint32_t i = 0; i < n; ++i) {
                const cplx v = field[m][i];
                put_f32(out, static_cast<float>(v.real()));
                put_f32(out, static_cast<float>(v.imag()));
            }
        }
    }
}

} // namespace detail

class DatasetWriter {
public:
    DatasetWriter(const std::string& path, DatasetHeader header)
        : header_(std::move(header)), path_(path), out_(path, std::ios::binary | std::ios::trunc)
    {
        header_.validate();
        if (!out_)
            throw io_error("cannot open dataset for writing: " + path);
        std::string buf;
        buf.reserve(dataset_header_size(header_));
        for (auto b : dataset_magic)
            bytes::put_u8(buf, b);
        bytes::put_u32(buf, header_.version);
        bytes::put_f64(buf, header_.carrier_hz);
        bytes::put_f64(buf, header_.sample_rate_hz);
        bytes::put_u8(buf, header_.n_channels);
        bytes::put_u16(buf, header_.n_subcarriers);
        for (const auto& p : header_.element_positions)
            for (double coord : p)
                bytes::put_f64(buf, coord);
        bytes::put_u16(buf, static_cast<std::uint16_t>(header_.environment_label.size()));
        buf.append(header_.environment_label);
        count_offset_ = buf.size();
        bytes::put_u64(buf, 0); // record_count, patched on finalize
        out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        bytes_written_ = buf.size();
    }

    ~DatasetWriter()
    {
        try {
            if (!finalized_)
                finalize();
        } catch (...) {
        }
    }

    void append(const FrameRecord& record)
    {
        if (finalized_)
            throw io_error("dataset writer already finalized");
        detail::check_record_shape(header_, record);
        buffer_.clear();
        detail::encode_record(buffer_, header_, record);
        out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        if (!out_)
            throw io_error("write failed: " + path_);
        bytes_written_ += buffer_.size();
        ++count_;
    }

    // Patches the record count into the header and returns total bytes.
    std::uint64_t finalize()
    {
        if (finalized_)
            return bytes_written_;
        finalized_ = true;
        std::string buf;
        bytes::put_u64(buf, count_);
        out_.seekp(static_cast<std::streamoff>(count_offset_));
        out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        out_.flush();
        if (!out_)
            throw io_error("finalize failed: " + path_);
        return bytes_written_;
    }

    std::uint64_t records_written() const { return count_; }

private:
    DatasetHeader header_;
    std::string path_;
    std::ofstream out_;
    std::string buffer_;
    std::size_t count_offset_ = 0;
    std::uint64_t count_ = 0;
    std::uint64_t bytes_written_ = 0;
    bool finalized_ = false;
};

template <typename RecordRange>
inline std::uint64_t write_dataset(const std::string& path, const DatasetHeader& header,
                                   const RecordRange& records)
{
    DatasetWriter w(path, header);
    for (const auto& r : records)
        w.append(r);
    return w.finalize();
}

class DatasetReader {
public:
    explicit DatasetReader(const std::string& path) : in_(path, std::ios::binary)
    {
        if (!in_)
            throw io_error("cannot open dataset: " + path);

        std::array<char, 8> magic{};
        in_.read(magic.data(), 8);
        if (in_.gcount() != 8 || std::memcmp(magic.data(), dataset_magic.data(), 8) != 0)
            throw format_error("not a dataset file (bad magic)");

        std::string fixed = read_exact(4 + 8 + 8 + 1 + 2, "header");
        bytes::Cursor c(fixed.data(), fixed.size());
        header_.version = c.u32();
        if (header_.version > dataset_version)
            throw version_error("dataset version " + std::to_string(header_.version) +
                                " not supported");
        header_.carrier_hz = c.f64();
        header_.sample_rate_hz = c.f64();
        header_.n_channels = c.u8();
        header_.n_subcarriers = c.u16();
        if (header_.n_channels == 0 || header_.n_subcarriers != CsiMatrix::n_subcarriers)
            throw format_error("dataset header: unsupported shape");

        std::string pos = read_exact(static_cast<std::size_t>(header_.n_channels) * 24, "header");
        bytes::Cursor pc(pos.data(), pos.size());
        header_.element_positions.resize(header_.n_channels);
        for (auto& p : header_.element_positions)
            for (double& coord : p)
                coord = pc.f64();

        std::string lab_len = read_exact(2, "header");
        bytes::Cursor lc(lab_len.data(), lab_len.size());
        const std::uint16_t n = lc.u16();
        header_.environment_label = read_exact(n, "header");

        std::string cnt = read_exact(8, "header");
        bytes::Cursor cc(cnt.data(), cnt.size());
        header_.record_count = cc.u64();
    }

    const DatasetHeader& header() const { return header_; }
    std::uint64_t records_read() const { return index_; }

    // Next record, or nullopt once record_count records were delivered.
    // Throws truncation_error citing the record index if the stream ends or
    // desynchronizes mid-record.
    std::optional<FrameRecord> next()
    {
        if (index_ >= header_.record_count)
            return std::nullopt;
        FrameRecord r = read_record("record index " + std::to_string(index_));
        ++index_;
        return r;
    }

private:
    std::string read_exact(std::size_t n, const std::string& what)
    {
        std::string buf(n, '\0');
        in_.read(buf.data(), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw truncation_error("dataset truncated inside " + what);
        return buf;
    }

    FrameRecord read_record(const std::string& where)
    {
        FrameRecord r;
        const std::size_t n_ch = header_.n_channels;

        std::string head = read_exact(8 + 8 + 4 + 2, where);
        bytes::Cursor c(head.data(), head.size());
        r.id = c.u64();
        r.timestamp_s = c.f64();
        const float az = c.f32();
        if (!std::isnan(az))
            r.true_azimuth_deg = static_cast<double>(az);
        const std::uint16_t label_len = c.u16();
        r.position_label = read_exact(label_len, where);

        std::string mid = read_exact(n_ch * 4 + 8 + 4, where);
        bytes::Cursor mc(mid.data(), mid.size());
        r.snr_db.resize(n_ch);
        for (auto& v : r.snr_db)
            v = mc.f32();
        r.cfo_hz = mc.f64();
        r.detection_metric = mc.f32();

        const std::size_t csi_bytes = static_cast<std::size_t>(header_.n_subcarriers) * n_ch * 8;
        std::string csi_raw = read_exact(csi_bytes, where);
        bytes::Cursor cc(csi_raw.data(), csi_raw.size());
        r.csi = CsiMatrix(n_ch);
        for (std::size_t k = 0; k < header_.n_subcarriers; ++k) {
            for (std::size_t m = 0; m < n_ch; ++m) {
                const double re = cc.f32();
                const double im = cc.f32();
                r.csi.at(k, m) = cplx(re, im);
            }
        }

        for (std::size_t f = 0; f < n_preamble_fields; ++f) {
            std::string fh = read_exact(1 + 4, where);
            bytes::Cursor fc(fh.data(), fh.size());
            const std::uint8_t id = fc.u8();
            const std::uint32_t n_samples = fc.u32();
            if (id != f)
                throw format_error("dataset desynchronized at " + where + " (bad field id)");
            if (n_samples > (1u << 26))
                throw format_error("dataset desynchronized at " + where + " (absurd field length)");
            auto& block = r.fields.blocks[f];
            if (n_samples == 0) {
                block.clear();
                continue;
            }
            block.assign(n_ch, cvec(n_samples));
            std::string raw = read_exact(static_cast<std::size_t>(n_ch) * n_samples * 8, where);
            bytes::Cursor rc(raw.data(), raw.size());
            for (std::size_t m = 0; m < n_ch; ++m) {
                for (std::uint32_t i = 0; i < n_samples; ++i) {
                    const double re = rc.f32();
                    const double im = rc.f32();
                    block[m][i] = cplx(re, im);
                }
            }
        }
        return r;
    }

    std::ifstream in_;
    DatasetHeader header_;
    std::uint64_t index_ = 0;
};

struct ValidationViolation {
    std::uint64_t record_index = 0;
    std::string message;
};

struct ValidationReport {
    std::uint64_t declared_records = 0;
    std::uint64_t records_read = 0;
    std::vector<ValidationViolation> violations;
    double snr_min_db = 0.0;
    double snr_max_db = 0.0;
    std::array<std::uint64_t, 36> angle_histogram_5deg{}; // [-90, 90) in 5 degree bins
    std::uint64_t untracked_records = 0;

    bool clean() const { return violations.empty(); }
};

// Full read-only pass over a dataset: structural checks per record, SNR
// range, and the coverage histogram of tracked ground-truth angles.
inline ValidationReport validate_dataset(const std::string& path)
{
    DatasetReader reader(path);
    ValidationReport rep;
    rep.declared_records = reader.header().record_count;
    const auto table = preamble_field_table();
    bool first_snr = true;

    while (true) {
        const std::uint64_t idx = reader.records_read();
        std::optional<FrameRecord> rec;
        try {
            rec = reader.next();
        } catch (const std::exception& e) {
            rep.violations.push_back({idx, e.what()});
            break;
        }
        if (!rec)
            break;
        ++rep.records_read;

        if (!rec->csi.well_formed() || rec->csi.n_channels != reader.header().n_channels)
            rep.violations.push_back({idx, "CSI shape mismatch"});
        for (std::size_t f = 0; f < n_preamble_fields; ++f) {
            const auto& block = rec->fields.blocks[f];
            if (block.empty())
                continue;
            if (block.front().size() != table[f].length)
                rep.violations.push_back(
                    {idx, std::string("field length mismatch for ") + field_name(table[f].id)});
        }
        for (float v : rec->snr_db) {
            if (!std::isfinite(v) || v > 60.0f + 1e-3f || v < -60.0f - 1e-3f) {
                rep.violations.push_back({idx, "SNR out of range"});
                break;
            }
        }
        for (float v : rec->snr_db) {
            if (first_snr) {
                rep.snr_min_db = rep.snr_max_db = v;
                first_snr = false;
            } else {
                rep.snr_min_db = std::min(rep.snr_min_db, static_cast<double>(v));
                rep.snr_max_db = std::max(rep.snr_max_db, static_cast<double>(v));
            }
        }
        if (rec->true_azimuth_deg) {
            const double a = *rec->true_azimuth_deg;
            if (a >= -90.0 && a < 90.0)
                rep.angle_histogram_5deg[static_cast<std::size_t>((a + 90.0) / 5.0)]++;
        } else {
            ++rep.untracked_records;
        }
    }
    return rep;
}

} // namespace find
