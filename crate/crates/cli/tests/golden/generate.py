"""Writes the tabulate goldens from the Laguerre closed forms at 40 digits.

    Λ_{2,j}^{μ,-1}(x) = 2^{μ-1} Γ(j+(μ+1)/2) / Γ(j+μ+1) · e^{-x} L_j^μ(2x)
    Λ_{2,j}^{μ,+1}(x) = (2/x) Λ_{2,j}^{μ,-1}(x)

Run from this directory: python3 generate.py
"""
import mpmath as mp

mp.mp.dps = 40
XS = ["0.1", "0.3", "0.7", "1.2", "1.9", "2.6", "3.5", "5", "7.5", "11"]
J_MAX = 4


def lam_minus(mu, j, x):
    c = mp.power(2, mu - 1) * mp.gamma(j + (mu + 1) / mp.mpf(2)) / mp.gamma(j + mu + 1)
    return c * mp.exp(-x) * mp.laguerre(j, mu, 2 * x)


def write(mu, nu):
    rows = ["i,j,mu,nu,x,value"]
    for j in range(J_MAX + 1):
        for xs in XS:
            # the CLI sees the double nearest to each x
            x = mp.mpf(float(xs))
            v = lam_minus(mu, j, x)
            if nu == 1:
                v = 2 / x * v
            rows.append("2,%d,%.17g,%.17g,%.17g,%.17g" % (j, mu, nu, float(xs), float(v)))
    name = "tabulate_i2_mu%d_nu%s.csv" % (mu, "m1" if nu == -1 else "1")
    with open(name, "w", newline="\n") as f:
        f.write("\n".join(rows) + "\n")


write(3, 1)
write(3, -1)
