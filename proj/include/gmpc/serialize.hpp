#pragma once

// Canonical byte encodings: little-endian fixed-width integers and
// length-prefixed byte strings. All wire payloads, commitments and digests
// are built from these so serialized forms are unique and platform-stable.

#include <cstdint>
#include <string>

#include "gmpc/common.hpp"
#include "gmpc/field.hpp"

namespace gmpc {

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(std::uint8_t(v >> (8 * i)));
    }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(std::uint8_t(v >> (8 * i)));
    }

    void fp(Fp v) { u64(v.value()); }

    void raw(const Bytes& b) { out_.insert(out_.end(), b.begin(), b.end()); }

    void blob(const Bytes& b) { // length-prefixed
        u32(std::uint32_t(b.size()));
        raw(b);
    }

    void str(std::string_view s) {
        u32(std::uint32_t(s.size()));
        out_.insert(out_.end(), s.begin(), s.end());
    }

    Bytes take() { return std::move(out_); }
    const Bytes& peek() const { return out_; }

private:
    Bytes out_;
};

class Reader {
public:
    explicit Reader(const Bytes& data) : data_(data) {}

    std::uint8_t u8() { return data_[need(1)]; }

    std::uint32_t u32() {
        std::size_t at = need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(data_[at + i]) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        std::size_t at = need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(data_[at + i]) << (8 * i);
        return v;
    }

    Fp fp() { return Fp(u64()); }

    Bytes blob() {
        std::uint32_t len = u32();
        std::size_t at = need(len);
        return Bytes(data_.begin() + at, data_.begin() + at + len);
    }

    Bytes fixed(std::size_t n) { // exactly n raw bytes, no length prefix
        std::size_t at = need(n);
        return Bytes(data_.begin() + at, data_.begin() + at + n);
    }

    std::string str() {
        Bytes b = blob();
        return std::string(b.begin(), b.end());
    }

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    std::size_t need(std::size_t n) {
        if (pos_ + n > data_.size())
            throw std::out_of_range("Reader: truncated message");
        std::size_t at = pos_;
        pos_ += n;
        return at;
    }

    const Bytes& data_;
    std::size_t pos_ = 0;
};

} // namespace gmpc
