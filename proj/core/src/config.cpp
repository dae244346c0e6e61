#include "tlink/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tlink/rng.hpp"

namespace tlink {

std::string mode_name(TxMode m) {
  switch (m) {
    case TxMode::Uncoded: return "uncoded";
    case TxMode::Kr: return "kr";
    case TxMode::Rc: return "rc";
  }
  throw std::invalid_argument("unknown mode");
}

TxMode mode_from_name(const std::string& name) {
  if (name == "uncoded") return TxMode::Uncoded;
  if (name == "kr") return TxMode::Kr;
  if (name == "rc") return TxMode::Rc;
  throw std::invalid_argument("unknown mode: " + name);
}

PowerDelayProfile SimConfig::profile() const {
  if (taps_override) {
    taps_override->validate();
    return *taps_override;
  }
  return PowerDelayProfile::from_ns_db(delays_ns, powers_db, sample_rate_hz);
}

Constellation SimConfig::constellation() const {
  return Constellation(const_kind, const_order);
}

double SimConfig::sigma2(double ebn0_db) const {
  const double bits = std::log2(static_cast<double>(const_order));
  return static_cast<double>(m_t) / (bits * std::pow(10.0, ebn0_db / 10.0));
}

void SimConfig::validate() const {
  if (n < 1 || m_t < 1 || m_r < 1 || k < 1 || q < 1 || cp_len < 0)
    throw std::invalid_argument("system dimensions must be positive");
  if (delta_f < m_t)
    throw std::invalid_argument("pilots.delta_f must be >= system.m_t");
  if (delta_f > n) throw std::invalid_argument("pilots.delta_f exceeds system.n");
  if (delta_k < 1 || delta_k > k)
    throw std::invalid_argument("pilots.delta_k must be in [1, system.k]");
  Constellation probe(const_kind, const_order);
  const PowerDelayProfile pdp = profile();
  if (cp_len < pdp.tap_span() - 1)
    throw std::invalid_argument("system.cp_len shorter than the channel delay spread");
  if (n / delta_f < pdp.tap_span())
    throw std::invalid_argument(
        "fewer pilot subcarriers per antenna than channel taps");
  if (per_subcarrier_coding)
    throw std::invalid_argument(
        "coding.per_subcarrier = true is not supported; one code block is "
        "shared by all subcarriers");

  switch (mode) {
    case TxMode::Uncoded:
      if (q != 1) throw std::invalid_argument("uncoded mode needs system.q = 1");
      break;
    case TxMode::Kr:
      if (q != m_t)
        throw std::invalid_argument("kr mode needs system.q == system.m_t");
      break;
    case TxMode::Rc:
      if (q < 2) throw std::invalid_argument("rc mode needs system.q >= 2");
      break;
  }

  for (ReceiverKind r : receivers) {
    const bool uncoded_rx =
        r == ReceiverKind::Zf || r == ReceiverKind::Ilsp || r == ReceiverKind::Rlsp;
    const bool kr_rx = r == ReceiverKind::Kr || r == ReceiverKind::KrLs;
    const bool rc_rx = r == ReceiverKind::RcKr || r == ReceiverKind::RcKrAls;
    if ((uncoded_rx && mode != TxMode::Uncoded) || (kr_rx && mode != TxMode::Kr) ||
        (rc_rx && mode != TxMode::Rc))
      throw std::invalid_argument("receiver " + receiver_name(r) +
                                  " does not match mode " + mode_name(mode));
    if ((uncoded_rx || rc_rx) && m_r < m_t)
      throw std::invalid_argument("receiver " + receiver_name(r) +
                                  " needs system.m_r >= system.m_t");
    if (r == ReceiverKind::Ilsp && k < m_t)
      throw std::invalid_argument("ilsp channel updates need system.k >= system.m_t");
    if (rc_rx && (m_r * q < m_t || m_r * k < m_t))
      throw std::invalid_argument(
          "rc receivers need m_r*q >= m_t and m_r*k >= m_t");
  }

  if (trials < 0) throw std::invalid_argument("trials must be non-negative");
  for (double e : ebn0_grid_db)
    if (!std::isfinite(e)) throw std::invalid_argument("non-finite Eb/N0 value");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

double to_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw std::invalid_argument("bad numeric value for " + key + ": " + v);
  }
}

long long to_int(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return i;
  } catch (...) {
    throw std::invalid_argument("bad integer value for " + key + ": " + v);
  }
}

std::vector<double> to_doubles(const std::string& v, const std::string& key) {
  std::vector<double> out;
  for (const auto& part : split(v, ',')) out.push_back(to_double(part, key));
  return out;
}

PowerDelayProfile parse_taps(const std::string& v, const std::string& key) {
  // "delay:linear_power,delay:linear_power,..."
  PowerDelayProfile pdp;
  for (const auto& part : split(v, ',')) {
    const auto sep = part.find(':');
    if (sep == std::string::npos)
      throw std::invalid_argument(key + " entries must be delay:power pairs");
    pdp.delays.push_back(to_int(trim(part.substr(0, sep)), key));
    pdp.powers.push_back(to_double(trim(part.substr(sep + 1)), key));
  }
  double total = 0.0;
  for (double p : pdp.powers) total += p;
  if (total <= 0.0) throw std::invalid_argument(key + " powers must be positive");
  for (double& p : pdp.powers) p /= total;
  pdp.validate();
  return pdp;
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("bad boolean value for " + key + ": " + v);
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "system.n") cfg.n = to_int(value, key);
    else if (key == "system.m_t") cfg.m_t = to_int(value, key);
    else if (key == "system.m_r") cfg.m_r = to_int(value, key);
    else if (key == "system.k") cfg.k = to_int(value, key);
    else if (key == "system.q") cfg.q = to_int(value, key);
    else if (key == "system.cp_len") cfg.cp_len = to_int(value, key);
    else if (key == "pilots.delta_f") cfg.delta_f = to_int(value, key);
    else if (key == "pilots.delta_k") cfg.delta_k = to_int(value, key);
    else if (key == "constellation.kind") {
      if (value == "qam") cfg.const_kind = ConstellationKind::Qam;
      else if (value == "psk") cfg.const_kind = ConstellationKind::Psk;
      else throw std::invalid_argument("constellation.kind must be qam or psk");
    } else if (key == "constellation.order") {
      cfg.const_order = static_cast<int>(to_int(value, key));
    } else if (key == "channel.delays_ns") cfg.delays_ns = to_doubles(value, key);
    else if (key == "channel.powers_db") cfg.powers_db = to_doubles(value, key);
    else if (key == "channel.sample_rate_hz") cfg.sample_rate_hz = to_double(value, key);
    else if (key == "channel.taps_override") cfg.taps_override = parse_taps(value, key);
    else if (key == "coding.per_subcarrier") cfg.per_subcarrier_coding = to_bool(value, key);
    else if (key == "mode") cfg.mode = mode_from_name(value);
    else if (key == "receivers") {
      cfg.receivers.clear();
      for (const auto& name : split(value, ','))
        cfg.receivers.push_back(receiver_from_name(name));
    } else if (key == "ebn0_grid_db") cfg.ebn0_grid_db = to_doubles(value, key);
    else if (key == "trials") cfg.trials = static_cast<int>(to_int(value, key));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(value, key));
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string SimConfig::canonical_text() const {
  std::ostringstream os;
  os << "system.n = " << n << "\n";
  os << "system.m_t = " << m_t << "\n";
  os << "system.m_r = " << m_r << "\n";
  os << "system.k = " << k << "\n";
  os << "system.q = " << q << "\n";
  os << "system.cp_len = " << cp_len << "\n";
  os << "pilots.delta_f = " << delta_f << "\n";
  os << "pilots.delta_k = " << delta_k << "\n";
  os << "constellation.kind = " << Constellation::kind_name(const_kind) << "\n";
  os << "constellation.order = " << const_order << "\n";
  if (taps_override) {
    os << "channel.taps_override = ";
    for (size_t i = 0; i < taps_override->delays.size(); ++i) {
      if (i) os << ",";
      os << taps_override->delays[i] << ":" << taps_override->powers[i];
    }
    os << "\n";
  } else {
    os << "channel.delays_ns = ";
    for (size_t i = 0; i < delays_ns.size(); ++i)
      os << (i ? "," : "") << delays_ns[i];
    os << "\nchannel.powers_db = ";
    for (size_t i = 0; i < powers_db.size(); ++i)
      os << (i ? "," : "") << powers_db[i];
    os << "\nchannel.sample_rate_hz = " << sample_rate_hz << "\n";
  }
  os << "coding.per_subcarrier = " << (per_subcarrier_coding ? "true" : "false")
     << "\n";
  os << "mode = " << mode_name(mode) << "\n";
  os << "receivers = ";
  for (size_t i = 0; i < receivers.size(); ++i)
    os << (i ? "," : "") << receiver_name(receivers[i]);
  os << "\nebn0_grid_db = ";
  for (size_t i = 0; i < ebn0_grid_db.size(); ++i)
    os << (i ? "," : "") << ebn0_grid_db[i];
  os << "\ntrials = " << trials << "\n";
  os << "seed = " << seed << "\n";
  return os.str();
}

std::uint64_t SimConfig::digest() const {
  return detail::fnv1a(canonical_text());
}

}  // namespace tlink
