#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "rarm/context.hpp"

namespace fixtures {

/// Six objects over items a..e (ids 0..4):
///   o1 bce, o2 acd, o3 abcd, o4 ad, o5 abcd, o6 acd
inline const char* table1_csv =
    "tid,item\n"
    "o1,b\no1,c\no1,e\n"
    "o2,a\no2,c\no2,d\n"
    "o3,a\no3,b\no3,c\no3,d\n"
    "o4,a\no4,d\n"
    "o5,a\no5,b\no5,c\no5,d\n"
    "o6,a\no6,c\no6,d\n";

inline rarm::Context table1() {
    using rarm::Itemset;
    return rarm::Context::from_rows({"o1", "o2", "o3", "o4", "o5", "o6"}, std::vector<std::string>{"a", "b", "c", "d", "e"},
                                    {Itemset{1, 2, 4}, Itemset{0, 2, 3}, Itemset{0, 1, 2, 3}, Itemset{0, 3},
                                     Itemset{0, 1, 2, 3}, Itemset{0, 2, 3}});
}

namespace items {
inline constexpr rarm::ItemId a = 0, b = 1, c = 2, d = 3, e = 4;
} // namespace items

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("rarm-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        const auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace fixtures
