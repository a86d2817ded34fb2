#include "ins/snapshot.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>

namespace ins {

namespace {

using json = nlohmann::json;

void write_u32_le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32_le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

bool host_is_little_endian() {
    const std::uint32_t probe = 1;
    unsigned char b;
    std::memcpy(&b, &probe, 1);
    return b == 1;
}

void write_doubles_le(std::ostream& os, const double* p, std::size_t count) {
    if (host_is_little_endian()) {
        os.write(reinterpret_cast<const char*>(p), count * sizeof(double));
        return;
    }
    for (std::size_t i = 0; i < count; ++i) {
        unsigned char b[8];
        std::memcpy(b, &p[i], 8);
        std::swap(b[0], b[7]);
        std::swap(b[1], b[6]);
        std::swap(b[2], b[5]);
        std::swap(b[3], b[4]);
        os.write(reinterpret_cast<const char*>(b), 8);
    }
}

void read_doubles_le(std::istream& is, double* p, std::size_t count) {
    is.read(reinterpret_cast<char*>(p), count * sizeof(double));
    if (!host_is_little_endian()) {
        for (std::size_t i = 0; i < count; ++i) {
            unsigned char b[8];
            std::memcpy(b, &p[i], 8);
            std::swap(b[0], b[7]);
            std::swap(b[1], b[6]);
            std::swap(b[2], b[5]);
            std::swap(b[3], b[4]);
            std::memcpy(&p[i], b, 8);
        }
    }
}

void write_header_and_data(const std::string& path, const Grid& g, const std::string& name,
                           double time, const std::vector<const double*>& comps) {
    json hdr;
    hdr["magic"] = "insfield1";
    hdr["n"] = g.n;
    hdr["d"] = g.d;
    hdr["name"] = name;
    hdr["time"] = time;
    hdr["components"] = static_cast<int>(comps.size());
    const std::string htxt = hdr.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("snapshot: cannot open for writing: " + path);
    write_u32_le(os, static_cast<std::uint32_t>(htxt.size()));
    os.write(htxt.data(), static_cast<std::streamsize>(htxt.size()));
    for (const double* p : comps) write_doubles_le(os, p, g.size());
    if (!os) throw Error("snapshot: write failed: " + path);
}

}  // namespace

void write_snapshot(const std::string& path, const ScalarField& f, const std::string& name,
                    double time) {
    write_header_and_data(path, f.grid(), name, time, {f.data()});
}

void write_snapshot(const std::string& path, const VectorField& v, const std::string& name,
                    double time) {
    std::vector<const double*> comps;
    for (int c = 0; c < v.dim(); ++c) comps.push_back(v[c].data());
    write_header_and_data(path, v.grid(), name, time, comps);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("snapshot: cannot open: " + path);
    const std::uint32_t hlen = read_u32_le(is);
    if (!is || hlen == 0 || hlen > (1u << 20)) throw Error("snapshot: bad header length");
    std::string htxt(hlen, '\0');
    is.read(htxt.data(), hlen);
    json hdr = json::parse(htxt, nullptr, false);
    if (hdr.is_discarded() || hdr.value("magic", "") != std::string("insfield1"))
        throw Error("snapshot: bad header: " + path);

    Snapshot out;
    out.grid.n = hdr.at("n").get<int>();
    out.grid.d = hdr.at("d").get<int>();
    out.grid.validate();
    out.name = hdr.at("name").get<std::string>();
    out.time = hdr.at("time").get<double>();
    out.components = hdr.at("components").get<int>();
    out.data.resize(out.components);
    for (int c = 0; c < out.components; ++c) {
        out.data[c].resize(out.grid.size());
        read_doubles_le(is, out.data[c].data(), out.grid.size());
    }
    if (!is) throw Error("snapshot: truncated data: " + path);
    return out;
}

ScalarField snapshot_scalar(const Snapshot& s, int component) {
    ScalarField f(s.grid);
    std::copy(s.data.at(component).begin(), s.data.at(component).end(), f.data());
    return f;
}

VectorField snapshot_vector(const Snapshot& s) {
    if (s.components != s.grid.d) throw Error("snapshot: component count != d");
    VectorField v(s.grid);
    for (int c = 0; c < s.components; ++c)
        std::copy(s.data[c].begin(), s.data[c].end(), v[c].data());
    return v;
}

}  // namespace ins
