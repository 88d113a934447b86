#pragma once

// Straight-line restatement of the registration, login and authentication
// equations over raw byte arrays. Deliberately shares no code with the
// library: hashing goes straight to OpenSSL and every field is computed in
// the order the protocol defines it.

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

using D = std::array<std::uint8_t, 20>;
using Buf = std::vector<std::uint8_t>;

inline D h(const Buf& in) {
  std::array<std::uint8_t, 32> full{};
  unsigned int len = 0;
  if (EVP_Digest(in.data(), in.size(), full.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("EVP_Digest");
  D out{};
  for (int i = 0; i < 20; ++i) out[i] = full[i];
  return out;
}

inline D x(const D& a, const D& b) {
  D out{};
  for (int i = 0; i < 20; ++i) out[i] = a[i] ^ b[i];
  return out;
}

inline Buf cat(std::initializer_list<Buf> parts) {
  Buf out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline Buf b(const D& d) { return Buf(d.begin(), d.end()); }
inline Buf b(const std::string& s) { return Buf(s.begin(), s.end()); }
inline Buf t(std::uint64_t v) {
  Buf out(8);
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(v & 0xFF);
    v >>= 8;
  }
  return out;
}

// Random draws of one run, harvested from the system under test.
struct Inputs {
  D s_hms{}, id_hms{};
  D id{};
  std::string pw;
  D sigma{};        // fuzzy-extractor key recovered from the biometric
  D t_g{};
  D r1{};
  std::uint64_t t1 = 0;
  D n_s{};
  std::uint64_t t2 = 0;
  D r2{};
};

struct Fields {
  // registration request
  D x_token{}, b{}, pwd{}, did{};
  // server registration
  D t_g_recovered{}, id_recovered{}, d_tid{}, ax{}, k{}, eid{}, hid{};
  // card
  D e{}, f{};
  // login (user)
  D b_star{}, pwd_star{}, d_tid_star{}, k_star{}, f_star{}, c_user{}, h_ids_user{}, w1_user{}, m1{};
  // authentication (server)
  D d_tid_2star{}, t_g_server{}, c_server{}, w1_server{}, m1_server{}, sk{}, m2{}, m3{};
  D d_tid_new{}, ax_new{}, eid_new{}, hid_new{};
  // reply check (user)
  D sk_user{}, m3_user{};
};

inline Fields run(const Inputs& in) {
  Fields o;
  const D h_s = h(b(in.s_hms));
  const D h_ids = h(cat({b(in.id_hms), b(in.s_hms)}));

  o.x_token = h(b(in.t_g));
  o.b = h(b(in.sigma));
  o.pwd = h(cat({b(in.pw), b(o.b)}));
  o.did = x(in.id, h(cat({b(o.x_token), b(in.t_g)})));

  o.t_g_recovered = in.t_g;
  o.id_recovered = x(o.did, h(cat({b(o.x_token), b(in.t_g)})));
  o.d_tid = x(o.id_recovered, in.r1);
  o.ax = x(in.t_g, h(cat({b(o.d_tid), b(in.id_hms)})));
  o.k = x(h(cat({b(in.s_hms), b(o.id_recovered)})), o.pwd);
  o.eid = x(o.d_tid, h_s);
  o.hid = x(h_ids, o.d_tid);

  o.e = x(o.k, h(cat({b(o.pwd), b(o.b)})));
  o.f = h(b(x(x(o.pwd, o.k), o.b)));

  o.b_star = h(b(in.sigma));
  o.pwd_star = h(cat({b(in.pw), b(o.b_star)}));
  o.d_tid_star = x(in.id, in.r1);
  o.k_star = x(o.e, h(cat({b(o.pwd_star), b(o.b_star)})));
  o.f_star = h(b(x(x(o.pwd_star, o.k_star), o.b_star)));
  o.c_user = x(o.k_star, o.pwd_star);
  o.h_ids_user = x(o.hid, o.d_tid_star);
  o.w1_user = h(cat({b(o.d_tid_star), b(o.h_ids_user)}));
  o.m1 = h(cat({b(o.c_user), t(in.t1), b(o.w1_user)}));

  o.d_tid_2star = x(o.eid, h_s);
  o.t_g_server = x(o.ax, h(cat({b(o.d_tid_2star), b(in.id_hms)})));
  o.c_server = h(cat({b(in.s_hms), b(in.id)}));
  o.w1_server = h(cat({b(o.d_tid_2star), b(h_ids)}));
  o.m1_server = h(cat({b(o.c_server), t(in.t1), b(o.w1_server)}));
  o.sk = h(cat({b(o.w1_server), b(in.n_s)}));
  o.m2 = x(o.sk, o.w1_server);
  o.m3 = h(cat({b(o.c_server), t(in.t2), b(o.w1_server), b(o.sk)}));
  o.d_tid_new = x(in.id, in.r2);
  o.ax_new = x(o.t_g_server, h(cat({b(o.d_tid_new), b(in.id_hms)})));
  o.eid_new = x(o.d_tid_new, h_s);
  o.hid_new = x(h_ids, o.d_tid_new);

  o.sk_user = x(o.m2, o.w1_user);
  o.m3_user = h(cat({b(o.c_user), t(in.t2), b(o.w1_user), b(o.sk_user)}));
  return o;
}

}  // namespace oracle
