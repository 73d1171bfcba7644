#include "radneumann/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <system_error>

#include "radneumann/errors.hpp"

namespace radneumann {

std::string format_real(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        writer(os);
        os.flush();
        if (!os)
            throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
    }
}

namespace {

bool parse_row(const std::string& line, std::size_t columns, std::vector<double>& out)
{
    out.clear();
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos)
            comma = line.size();
        std::string field = line.substr(pos, comma - pos);
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        if (first == std::string::npos)
            return false;
        field = field.substr(first, last - first + 1);
        double v = 0.0;
        auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size())
            return false;
        out.push_back(v);
        pos = comma + 1;
    }
    return out.size() == columns;
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(std::istream& is, std::size_t columns)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::vector<double> row;
    bool first = true;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto nonblank = line.find_first_not_of(" \t\r");
        if (nonblank == std::string::npos || line[nonblank] == '#')
            continue;
        if (parse_row(line, columns, row)) {
            rows.push_back(row);
        } else if (!first) {
            throw Error(ErrorKind::Precondition,
                        "malformed CSV row at line " + std::to_string(lineno) + ": '" + line + "'");
        }
        first = false;
    }
    return rows;
}

}  // namespace radneumann
