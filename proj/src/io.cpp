#include "lgt/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace lgt {

namespace {

const char* marker_partial = "# lgt-status: partial \n";
const char* marker_complete = "# lgt-status: complete\n";
const char* csv_header = "step,t,observable,params,value_re,value_im\n";

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::string& buf, T v)
{
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
    buf.append(b, sizeof(T));
}

template <class T>
T get(const std::string& buf, std::size_t& pos)
{
    if (pos + sizeof(T) > buf.size())
        throw IoError("snapshot truncated");
    char b[sizeof(T)];
    std::memcpy(b, buf.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
    pos += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

std::string fixed_name(const std::string& s)
{
    std::string r = s;
    r.resize(8, '\0');
    return r;
}

} // namespace

std::string csv_row(long step, double t, const std::string& observable, const std::string& params, double re,
                    double im)
{
    return fmt::format("{},{:.17g},{},\"{}\",{:.17g},{:.17g}\n", step, t, observable, params, re, im);
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc)
{
    if (!out_)
        throw IoError("cannot open '" + path + "' for writing");
    out_ << marker_partial << csv_header;
    out_.flush();
    if (!out_)
        throw IoError("write failed on '" + path + "'");
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(long step, double t, const std::string& observable, const std::string& params, double re,
                    double im)
{
    raw(csv_row(step, t, observable, params, re, im));
}

void CsvWriter::raw(const std::string& line)
{
    out_ << line;
    if (!out_)
        throw IoError("write failed on '" + path_ + "'");
}

void CsvWriter::finish()
{
    if (done_)
        return;
    out_.flush();
    out_.seekp(0);
    out_ << marker_complete;
    out_.close();
    if (out_.fail())
        throw IoError("write failed on '" + path_ + "'");
    done_ = true;
}

void write_file_atomic(const std::string& path, const std::string& contents)
{
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot open '" + tmp + "' for writing");
        f.write(contents.data(), std::streamsize(contents.size()));
        f.close();
        if (f.fail())
            throw IoError("write failed on '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot rename '" + tmp + "': " + ec.message());
}

void write_snapshot(const std::string& path, const Lattice& L, const SystemState& s, double lambda, double dt,
                    std::uint64_t seed)
{
    require(L, s.gauge);
    require(L, s.scalar);
    const Plane phase = s.phase.empty() ? Plane(L.vertices(), 0.0) : s.phase;
    require(L, phase);
    std::string buf(snapshot_magic, 8);
    put<std::uint32_t>(buf, snapshot_version);
    put<std::int32_t>(buf, L.n());
    put<double>(buf, lambda);
    put<double>(buf, dt);
    put<double>(buf, s.t);
    put<std::uint64_t>(buf, seed);
    put<std::int64_t>(buf, s.step);
    const char* names[5] = {"h", "v", "re", "im", "phase"};
    put<std::uint32_t>(buf, 5);
    for (auto* nm : names)
        buf += fixed_name(nm);
    for (const Plane* p : {&s.gauge.h, &s.gauge.v, &s.scalar.re, &s.scalar.im, &phase})
        for (double x : *p)
            put<double>(buf, x);
    write_file_atomic(path, buf);
}

Snapshot read_snapshot(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < 8 || std::memcmp(buf.data(), snapshot_magic, 8) != 0)
        throw IoError("'" + path + "' is not a snapshot");
    std::size_t pos = 8;
    Snapshot s;
    auto& h = s.header;
    h.version = get<std::uint32_t>(buf, pos);
    if (h.version != snapshot_version)
        throw IoError(fmt::format("unsupported snapshot version {}", h.version));
    h.n = get<std::int32_t>(buf, pos);
    h.lambda = get<double>(buf, pos);
    h.dt = get<double>(buf, pos);
    h.t = get<double>(buf, pos);
    h.seed = get<std::uint64_t>(buf, pos);
    h.step = get<std::int64_t>(buf, pos);
    std::uint32_t np = get<std::uint32_t>(buf, pos);
    if (np != 5)
        throw IoError("unexpected snapshot layout");
    for (std::uint32_t i = 0; i < np; ++i) {
        if (pos + 8 > buf.size())
            throw IoError("snapshot truncated");
        std::string nm = buf.substr(pos, 8);
        pos += 8;
        h.layout.push_back(nm.substr(0, nm.find('\0')));
    }
    if (h.n < 1 || h.n > 14)
        throw IoError("snapshot has invalid n");
    Lattice L(h.n);
    s.state.gauge = GaugeField(L);
    s.state.scalar = ScalarField(L);
    s.state.phase.assign(L.vertices(), 0.0);
    for (Plane* p : {&s.state.gauge.h, &s.state.gauge.v, &s.state.scalar.re, &s.state.scalar.im, &s.state.phase})
        for (double& x : *p)
            x = get<double>(buf, pos);
    if (pos != buf.size())
        throw IoError("trailing bytes in snapshot");
    s.state.t = h.t;
    s.state.step = h.step;
    return s;
}

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 failed");
    std::string out;
    for (unsigned i = 0; i < len; ++i)
        out += fmt::format("{:02x}", md[i]);
    return out;
}

} // namespace lgt
