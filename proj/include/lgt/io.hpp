#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgt/fields.hpp"

namespace lgt {

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// First line is a fixed-width status marker rewritten to "complete" by finish();
// a file interrupted mid-run keeps the "partial" marker.
class CsvWriter
{
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(long step, double t, const std::string& observable, const std::string& params, double re,
             double im);
    void raw(const std::string& line);
    void finish();

private:
    std::string path_;
    std::ofstream out_;
    bool done_ = false;
};

std::string csv_row(long step, double t, const std::string& observable, const std::string& params, double re,
                    double im);

constexpr char snapshot_magic[8] = {'L', 'G', 'T', 'S', 'N', 'A', 'P', '1'};
constexpr std::uint32_t snapshot_version = 1;

struct SnapshotHeader
{
    std::uint32_t version = snapshot_version;
    std::int32_t n = 0;
    double lambda = 0, dt = 0, t = 0;
    std::uint64_t seed = 0;
    std::int64_t step = 0;
    std::vector<std::string> layout; // plane names in file order
};

// header then planes h, v, re, im, phase; little-endian float64, row-major.
// Written to a temporary name and renamed, so a snapshot on disk is never partial.
void write_snapshot(const std::string& path, const Lattice& L, const SystemState& s, double lambda, double dt,
                    std::uint64_t seed);
struct Snapshot
{
    SnapshotHeader header;
    SystemState state;
};
Snapshot read_snapshot(const std::string& path);

std::string sha256_hex(const std::string& data);
// atomically replace path with contents
void write_file_atomic(const std::string& path, const std::string& contents);

} // namespace lgt
