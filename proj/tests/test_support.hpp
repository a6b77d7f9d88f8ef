#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testing_support {

namespace fs = std::filesystem;

/// Fresh, empty directory under the system temp dir.
inline fs::path scratch_dir(std::string const & name)
{
    auto const dir = fs::temp_directory_path() / ("sensemaker_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline void write_file(fs::path const & path, std::string const & text)
{
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::string read_file(fs::path const & path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline fs::path toy_dir()
{
    return fs::path(SENSEMAKER_TEST_DATA) / "toy";
}

} // namespace testing_support
