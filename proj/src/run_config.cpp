#include "radneumann/run_config.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "radneumann/csv.hpp"
#include "radneumann/errors.hpp"

namespace radneumann {

namespace {

template <class T>
T parse_number(const std::string& text, const std::string& key)
{
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw Error(ErrorKind::Precondition, "bad value '" + text + "' for " + key);
    return v;
}

}  // namespace

std::string RunConfig::canonical() const
{
    std::ostringstream os;
    os << "subcommand=" << subcommand << '\n'
       << "dim=" << dim << '\n'
       << "k=" << k << '\n'
       << "k_max=" << k_max << '\n'
       << "sign=" << (sign > 0 ? '+' : '-') << '\n'
       << "family=" << family << '\n'
       << "f=" << f_path << '\n'
       << "weight=" << weight << '\n'
       << "tol=" << format_real(tol) << '\n'
       << "out=" << out << '\n'
       << "suite=" << suite << '\n'
       << "seed=" << seed << '\n'
       << "parallel=" << (parallel ? "true" : "false") << '\n';
    return os.str();
}

RunConfig RunConfig::from_canonical(const std::string& text)
{
    RunConfig c;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Precondition, "malformed config line '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "subcommand")
            c.subcommand = val;
        else if (key == "dim")
            c.dim = parse_number<int>(val, key);
        else if (key == "k")
            c.k = parse_number<int>(val, key);
        else if (key == "k_max")
            c.k_max = parse_number<int>(val, key);
        else if (key == "sign") {
            if (val != "+" && val != "-")
                throw Error(ErrorKind::Precondition, "sign must be + or -");
            c.sign = val == "+" ? 1 : -1;
        } else if (key == "family")
            c.family = val;
        else if (key == "f")
            c.f_path = val;
        else if (key == "weight")
            c.weight = val;
        else if (key == "tol")
            c.tol = parse_number<double>(val, key);
        else if (key == "out")
            c.out = val;
        else if (key == "suite")
            c.suite = val;
        else if (key == "seed")
            c.seed = parse_number<std::uint64_t>(val, key);
        else if (key == "parallel") {
            if (val != "true" && val != "false")
                throw Error(ErrorKind::Precondition, "parallel must be true or false");
            c.parallel = val == "true";
        } else
            throw Error(ErrorKind::Precondition, "unknown config key '" + key + "'");
    }
    return c;
}

void RunConfig::validate() const
{
    if (dim < 2)
        throw Error(ErrorKind::Precondition, "--dim must be >= 2");
    if (k < 2)
        throw Error(ErrorKind::Precondition, "--k must be >= 2");
    if (k_max < 0)
        throw Error(ErrorKind::Precondition, "--k-max must be >= 0");
    if (sign != 1 && sign != -1)
        throw Error(ErrorKind::Precondition, "--sign must be + or -");
    if (!(tol > 0.0))
        throw Error(ErrorKind::Precondition, "--tol must be positive");
}

Tolerances RunConfig::tolerances() const
{
    return Tolerances::with_tol(tol);
}

NonlinearitySpec parse_family_selector(const std::string& text)
{
    const std::string prefix = "rational:";
    if (text.rfind(prefix, 0) != 0)
        throw Error(ErrorKind::Precondition, "family must look like rational:A,C,beta (got '" + text + "')");
    std::vector<double> vals;
    std::string rest = text.substr(prefix.size());
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        auto comma = rest.find(',', pos);
        if (comma == std::string::npos)
            comma = rest.size();
        vals.push_back(parse_number<double>(rest.substr(pos, comma - pos), "family"));
        pos = comma + 1;
    }
    if (vals.size() != 3)
        throw Error(ErrorKind::Precondition, "family needs exactly three parameters A,C,beta");
    return make_rational_family(vals[0], vals[1], vals[2]);
}

NonlinearitySpec RunConfig::nonlinearity() const
{
    if (!f_path.empty())
        return load_nonlinearity(f_path);
    return parse_family_selector(family);
}

WeightFn RunConfig::weight_fn() const
{
    if (weight == "unit")
        return WeightFn::unit();
    if (weight.rfind("file:", 0) == 0)
        return WeightFn::from_csv_file(weight.substr(5));
    throw Error(ErrorKind::Precondition, "--weight must be unit or file:<path>");
}

}  // namespace radneumann
