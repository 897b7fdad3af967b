#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "volmoe/error.hpp"
#include "volmoe/lstm.hpp"
#include "volmoe/textio.hpp"

namespace volmoe {

namespace {

constexpr std::string_view kMagic = "volmoe-lstm-checkpoint v1";

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

} // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    ckpt.params.validate();
    out << kMagic << '\n';
    out << "hidden " << ckpt.params.hidden << '\n';
    out << "input " << ckpt.params.input << '\n';
    out << "window " << ckpt.window << '\n';
    out << "config_hash " << hex64(ckpt.config_hash) << '\n';
    const auto blocks = ckpt.params.blocks();
    for (std::size_t b = 0; b < kParamBlockCount; ++b) {
        out << kParamBlockNames[b] << ' ' << blocks[b].size();
        for (double x : blocks[b]) {
            out << ' ' << textio::format_double(x);
        }
        out << '\n';
    }
}

Checkpoint read_checkpoint(std::istream& in) {
    auto fail = [](const std::string& why) { throw Error(ErrorKind::Parse, "checkpoint: " + why); };
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        fail("bad magic line");
    }
    auto read_field = [&](std::string_view key) {
        std::string name;
        std::string value;
        if (!(in >> name >> value) || name != key) {
            fail("expected field '" + std::string(key) + "'");
        }
        return value;
    };
    long long hidden = 0;
    long long input = 0;
    long long window = 0;
    if (!textio::parse_int(read_field("hidden"), hidden) || hidden < 1) fail("bad hidden size");
    if (!textio::parse_int(read_field("input"), input) || input < 1) fail("bad input size");
    if (!textio::parse_int(read_field("window"), window) || window < 1) fail("bad window");
    const std::string hash_text = read_field("config_hash");
    std::uint64_t hash = 0;
    try {
        std::size_t used = 0;
        hash = std::stoull(hash_text, &used, 16);
        if (used != hash_text.size()) fail("bad config hash");
    } catch (const std::logic_error&) {
        fail("bad config hash");
    }

    Checkpoint ckpt;
    ckpt.params = LstmParams::zeros(static_cast<std::size_t>(hidden), static_cast<std::size_t>(input));
    ckpt.window = static_cast<int>(window);
    ckpt.config_hash = hash;
    auto blocks = ckpt.params.blocks();
    for (std::size_t b = 0; b < kParamBlockCount; ++b) {
        std::string name;
        std::size_t count = 0;
        if (!(in >> name >> count) || name != kParamBlockNames[b] || count != blocks[b].size()) {
            fail("block '" + std::string(kParamBlockNames[b]) + "' missing or mis-sized");
        }
        for (double& x : blocks[b]) {
            std::string token;
            if (!(in >> token) || !textio::parse_double(token, x)) {
                fail("bad value in block '" + std::string(kParamBlockNames[b]) + "'");
            }
        }
    }
    ckpt.params.validate();
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    }
    write_checkpoint(out, ckpt);
    out.flush();
    if (!out) {
        throw Error(ErrorKind::Io, "failed while writing '" + path.string() + "'");
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open checkpoint '" + path.string() + "'");
    }
    return read_checkpoint(in);
}

} // namespace volmoe
