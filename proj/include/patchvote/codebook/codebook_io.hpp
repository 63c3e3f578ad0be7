// patchvote/codebook/codebook_io.hpp — codebook files.
//
// Binary little-endian: magic "PVCB", version u32, F u32, entry count u64,
// then packed entries: f32 descriptor[F], f32 offset[3], f32 quaternion
// (w,x,y,z), 128-byte foreground mask, u32 object id. The retrieval index is
// rebuilt on load.
#pragma once

#include <string>

#include "patchvote/codebook/codebook.hpp"
#include "patchvote/io/binary.hpp"

namespace pv {

namespace codebook_io_detail {
constexpr std::uint32_t kVersion = 1;
}

/// Bytes per packed entry for a given descriptor width.
inline std::size_t codebook_entry_bytes(int F) {
    return static_cast<std::size_t>(F) * 4 + 12 + 16 + 128 + 4;
}

inline void save_codebook(const Codebook& book, const std::string& path) {
    BinaryWriter out(path);
    out.bytes("PVCB", 4);
    out.u32(codebook_io_detail::kVersion);
    out.u32(static_cast<std::uint32_t>(book.feature_dim()));
    out.u64(book.size());
    for (std::size_t i = 0; i < book.size(); ++i) {
        out.f32_array(book.descriptor(i), static_cast<std::size_t>(book.feature_dim()));
        const CodebookEntry& e = book.entry(i);
        out.f32(e.vote.offset.x());
        out.f32(e.vote.offset.y());
        out.f32(e.vote.offset.z());
        out.f32(e.vote.orientation.w());
        out.f32(e.vote.orientation.x());
        out.f32(e.vote.orientation.y());
        out.f32(e.vote.orientation.z());
        out.bytes(e.fg_mask.data(), e.fg_mask.size());
        out.u32(e.object_id);
    }
    out.close();
}

inline Codebook load_codebook(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic("PVCB");
    const std::uint32_t version = in.u32();
    if (version != codebook_io_detail::kVersion)
        throw FormatError("codebook: unsupported version " + std::to_string(version) + " in " +
                              path,
                          in.offset() - 4);
    const int F = static_cast<int>(in.u32());
    if (F < 1 || F > 65536) throw FormatError("codebook: implausible F in " + path, in.offset() - 4);
    const std::uint64_t count = in.u64();

    Codebook book(F);
    book.descriptors_.resize(count * static_cast<std::size_t>(F));
    book.entries_.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        in.f32_array(book.descriptors_.data() + i * F, static_cast<std::size_t>(F));
        CodebookEntry& e = book.entries_[i];
        e.vote.offset.x() = in.f32();
        e.vote.offset.y() = in.f32();
        e.vote.offset.z() = in.f32();
        // Stored bytes are kept verbatim (bit-exact round trip); writers
        // guarantee canonical unit quaternions, so just validate.
        const float w = in.f32(), x = in.f32(), y = in.f32(), z = in.f32();
        e.vote.orientation = Eigen::Quaternionf(w, x, y, z);
        const float norm = e.vote.orientation.norm();
        if (w < 0.0f || norm < 0.999f || norm > 1.001f)
            throw FormatError("codebook: non-canonical quaternion in " + path, in.offset() - 16);
        in.bytes(e.fg_mask.data(), e.fg_mask.size());
        e.object_id = in.u32();
    }
    if (!in.at_eof()) throw FormatError("codebook: trailing bytes in " + path, in.offset());
    book.rebuild_index();
    return book;
}

}  // namespace pv
