"""Built-in identity catalog.

Records are written in the record text fields of :mod:`.records`. Point
evaluations such as f(pi/2) are produced by substituting into a template
whose argument slot is ``@``.
"""

from __future__ import annotations

from functools import lru_cache

from .records import IdentityRecord, record_from_fields

T1P = "dtheta1(0|tau)"


def at(template: str, arg: str) -> str:
    return template.replace("@", f"({arg})")


def _theta_sum(kind_num: int, kind_den: int, weight: str, shift: str = "k*pi/n") -> str:
    return (
        f"sum(k, 0, n-1, {weight}*theta{kind_num}(z+y-{shift}|tau)/theta{kind_den}(z-{shift}|tau))"
    )


# f(t) = theta1(t+u) theta1(t+v) theta1(t+w) theta1(t+y-u-v-w): f(t) = q^2 e^{8it+2iy} f(t+pi tau)
F4 = "theta1(@+u|tau)*theta1(@+v|tau)*theta1(@+w|tau)*theta1(@+y-u-v-w|tau)"
# the same with y = 0 (the functional equation of the quintuple-product theorem)
F4_0 = "theta1(@+u|tau)*theta1(@+v|tau)*theta1(@+w|tau)*theta1(@-u-v-w|tau)"
F4_0_PRIME = (
    "(dtheta1(@+u|tau)*theta1(@+v|tau)*theta1(@+w|tau)*theta1(@-u-v-w|tau)"
    " + theta1(@+u|tau)*dtheta1(@+v|tau)*theta1(@+w|tau)*theta1(@-u-v-w|tau)"
    " + theta1(@+u|tau)*theta1(@+v|tau)*dtheta1(@+w|tau)*theta1(@-u-v-w|tau)"
    " + theta1(@+u|tau)*theta1(@+v|tau)*theta1(@+w|tau)*dtheta1(@-u-v-w|tau))"
)
F_KJ5 = "theta1(@+y|tau)*theta1(3*@|3*tau)"
F_QUINT = "exp_i(@)*theta1(@|tau)*theta4(3*@+pi*tau/2|3*tau)"
HALF = "pi/2+pi*tau/2"


def thm111_rhs(f: str) -> str:
    return (
        f"{at(f, '0')}*theta1(z+y|tau)/theta1(z|tau)"
        f" - {at(f, 'pi/2')}*theta2(z+y|tau)/theta2(z|tau)"
        f" + q^(1/2)*{at(f, HALF)}*exp_i(y)*theta3(z+y|tau)/theta3(z|tau)"
        f" - q^(1/2)*{at(f, 'pi*tau/2')}*exp_i(y)*theta4(z+y|tau)/theta4(z|tau)"
    )


def kj3_lhs(f: str) -> str:
    return (
        f"{at(f, '0')} - {at(f, 'pi/2')} + q^(1/2)*{at(f, HALF)} - q^(1/2)*{at(f, 'pi*tau/2')}"
    )


def kiepert2_rhs(f: str, fprime: str) -> str:
    den = f"(2*{T1P})"
    return (
        f"{at(fprime, '0')}/{den}"
        f" + {at(f, '0')}*dtheta1(z|tau)/({den}*theta1(z|tau))"
        f" - {at(f, 'pi/2')}*dtheta2(z|tau)/({den}*theta2(z|tau))"
        f" + q^(1/2)*{at(f, HALF)}*dtheta3(z|tau)/({den}*theta3(z|tau))"
        f" - q^(1/2)*{at(f, 'pi*tau/2')}*dtheta4(z|tau)/({den}*theta4(z|tau))"
    )


# decomposition instances: F = theta1(z-u) theta1(z+y+u)
F2 = "theta1(@-u|tau)*theta1(@+y+u|tau)"
G_PAIR = "theta1(@-v|tau)*theta1(@+v|tau)"
G_PAIR_PRIME = "(dtheta1(@-v|tau)*theta1(@+v|tau) + theta1(@-v|tau)*dtheta1(@+v|tau))"
G_MIXED = "theta1(@-v|tau)*theta3(@+v|tau)"
G_MIXED_PRIME = "(dtheta1(@-v|tau)*theta3(@+v|tau) + theta1(@-v|tau)*dtheta3(@+v|tau))"
A2 = f"{HALF}-v"  # second zero of G_MIXED


def thm19_rhs(zeros, kind: int) -> str:
    gp = G_PAIR_PRIME if kind == 1 else G_MIXED_PRIME
    return " + ".join(
        f"{at(F2, a)}*theta{kind}(z+y-({a})|tau)/({at(gp, a)}*theta1(z-({a})|tau))" for a in zeros
    )


def lam(fields: str, arg: str | None = None, scale: str = "tau") -> str:
    inner = scale if arg is None else f"{arg}|{scale}"
    return f"lambert{{{fields}}}({inner})"


def _records() -> list[dict]:
    R: list[dict] = []

    def add(**kw):
        R.append(kw)

    # ---- section 1: products, 1psi1 and the Kronecker function ----------
    add(id="eta-product", anchor="(6)", lhs="eta(tau)", rhs="q^(1/24)*qpoch(q|tau)")
    add(id="theta1-prime-eta", anchor="(5)", lhs=T1P, rhs="2*eta(tau)^3", backends="numeric, formal")
    add(
        id="ramanujan-1psi1", anchor="(7)",
        lhs="psi11(u, v, x|tau)",
        rhs="qpoch(q|tau)*qpoch(v/u|tau)*qpoch(u*x|tau)*qpoch(q/(u*x)|tau)"
            "/(qpoch(v|tau)*qpoch(q/u|tau)*qpoch(x|tau)*qpoch(v/(u*x)|tau))",
        vars="u in annulus(0.5, 2), v in annulus(0.05, 0.5), x in annulus(0.1, 0.8)",
        where="abs(v/u) < 0.8*abs(x) and abs(x) < 0.8",
    )
    add(
        id="kronecker-8", anchor="(8)",
        lhs="lsum(x, u|tau)",
        rhs="qpoch(q|tau)^2*qpoch(u*x|tau)*qpoch(q/(u*x)|tau)"
            "/(qpoch(u|tau)*qpoch(q/u|tau)*qpoch(x|tau)*qpoch(q/x|tau))",
        vars="u in annulus(0.3, 3), x in annulus(0.05, 0.8)",
        where="abs(q) < 0.8*abs(x) and abs(u - 1) > 0.05",
    )
    add(
        id="kronecker-9", anchor="(9)",
        lhs="lsum(exp_i(2*y), exp_i(2*z)|tau)",
        rhs="i/2*K(y; z|tau)",
        vars="y in strip(0.05, 0.95), z in cell",
        avoid="z, y",
    )
    add(
        id="kronecker-pi-period", anchor="(11)",
        lhs="K(y; z+pi|tau)", rhs="K(y; z|tau)",
        vars="z in cell, y in cell", avoid="z, y",
    )
    add(
        id="kronecker-tau-period", anchor="(11)",
        lhs="K(y; z|tau)", rhs="exp_i(2*y)*K(y; z+pi*tau|tau)",
        vars="z in cell, y in cell", avoid="z, y",
    )
    f_a = "theta1(z-u|tau)*theta1(z+y+u|tau)/(theta1(z-v|tau)*theta1(z+v|tau))"
    r_plus = f"theta1(v-u|tau)*theta1(v+y+u|tau)/({T1P}*theta1(2*v|tau))"
    r_minus = f"theta1(-v-u|tau)*theta1(y+u-v|tau)/({T1P}*theta1(-2*v|tau))"
    add(
        id="theorem-1-7-instance", anchor="Theorem 1.7, (12)",
        lhs=f_a, rhs=f"{r_plus}*K(y; z-v|tau) + {r_minus}*K(y; z+v|tau)",
        vars="z in cell, y in cell, u in cell, v in cell",
        avoid="z-v, z+v, 2*v, y", guard="kronecker(y)",
    )
    f_b = "theta1(z-u|tau)*theta3(z+y+u|tau)/(theta1(z-v|tau)*theta1(z+v|tau))"
    s_plus = f"theta1(v-u|tau)*theta3(v+y+u|tau)/({T1P}*theta1(2*v|tau))"
    s_minus = f"theta1(-v-u|tau)*theta3(y+u-v|tau)/({T1P}*theta1(-2*v|tau))"
    add(
        id="theorem-1-8-instance", anchor="Theorem 1.8, (14)",
        lhs=f_b,
        rhs=f"{T1P}/theta3(y|tau)*({s_plus}*theta3(z+y-v|tau)/theta1(z-v|tau)"
            f" + {s_minus}*theta3(z+y+v|tau)/theta1(z+v|tau))",
        vars="z in cell, y in cell, u in cell, v in cell",
        avoid=f"z-v, z+v, 2*v, y-({HALF})", guard="theta3(y)",
    )
    add(
        id="theorem-1-9-instance", anchor="Theorem 1.9, (17)",
        lhs=f"{at(F2, 'z')}*theta1(y|tau)/({T1P}*{at(G_PAIR, 'z')})",
        rhs=thm19_rhs(["v", "-v"], 1),
        vars="z in cell, y in cell, u in cell, v in cell",
        avoid="z-v, z+v, 2*v, y", guard="kronecker(y)",
    )
    add(
        id="theorem-1-10-instance", anchor="Theorem 1.10, (20)",
        lhs=f"{at(F2, 'z')}*theta3(y|tau)/({T1P}*{at(G_MIXED, 'z')})",
        rhs=thm19_rhs(["v", A2], 3),
        vars="z in cell, y in cell, u in cell, v in cell",
        avoid=f"z-v, z+v-({HALF}), 2*v-({HALF}), y-({HALF})", guard="theta3(y)",
    )
    add(
        id="theorem-1-11-product", anchor="Theorem 1.11, (22)",
        lhs=f"2*theta1(y|tau)*{at(F4, 'z')}/theta1(2*z|tau)",
        rhs=thm111_rhs(F4),
        vars="z in cell, y in cell, u in cell, v in cell, w in cell",
        avoid="2*z",
    )
    add(
        id="theorem-1-11-kj5", anchor="(kj:5)",
        lhs="theta2(y|tau)*theta2(z+y|tau)*theta2(0|3*tau)/theta2(z|tau)"
            " + theta4(y|tau)*theta4(z+y|tau)*theta4(0|3*tau)/theta4(z|tau)",
        rhs="2*theta1(y|tau)*theta1(z+y|tau)*theta1(3*z|3*tau)/theta1(2*z|tau)"
            " + theta3(y|tau)*theta3(z+y|tau)*theta3(0|3*tau)/theta3(z|tau)",
        vars="z in cell, y in cell",
        avoid="2*z",
    )
    add(
        id="theorem-1-11-kj5-via-f", anchor="Theorem 1.11, (kj:5)",
        lhs=f"2*theta1(y|tau)*{at(F_KJ5, 'z')}/theta1(2*z|tau)",
        rhs=thm111_rhs(F_KJ5),
        vars="z in cell, y in cell",
        avoid="2*z",
    )
    # ---- section 3 ------------------------------------------------------
    add(
        id="kj3-vanishing", anchor="Theorem 3.2, (kj:3)",
        lhs=kj3_lhs(F4_0), rhs="0",
        vars="u in cell, v in cell, w in cell", compare="terms",
    )
    add(
        id="prop-3-3", anchor="Prop 3.3, (kj:4)",
        lhs=" - ".join(
            "*".join(f"theta{k}({a}|tau)" for a in ("u", "v", "w", "y")) for k in (1, 2)
        ) + " + " + " - ".join(
            "*".join(f"theta{k}({a}|tau)" for a in ("u", "v", "w", "y")) for k in (3, 4)
        ),
        rhs="0",
        vars="u in cell, v in cell, w in cell, y = -u-v-w", compare="terms",
    )
    add(
        id="jacobi-1", anchor="Theorem 3.4, (jacobi:1)",
        lhs=f"exp_i(2*m*z)*n*dtheta1(0|n*tau)*theta1(n*z+m*pi*tau+y|n*tau)*theta1(y|tau)"
            f"/({T1P}*theta1(y+m*pi*tau|n*tau)*theta1(n*z|n*tau))",
        rhs=_theta_sum(1, 1, "exp_i(2*m*k*pi/n)"),
        vars="z in cell, y in cell", params="n in 2..6; m in -4..4",
        avoid="n*z|n*tau, y+m*pi*tau|n*tau, y",
    )
    add(
        id="jacobi-2", anchor="(jacobi:2)",
        lhs=f"n*dtheta1(0|n*tau)*theta1(n*z+y|n*tau)*theta1(y|tau)"
            f"/({T1P}*theta1(n*z|n*tau)*theta1(y|n*tau))",
        rhs="sum(k, 0, n-1, theta1(z+y-k*pi/n|tau)/theta1(z-k*pi/n|tau))",
        vars="z in cell, y in cell", params="n in 1..6",
        avoid="n*z|n*tau, y|n*tau, y",
    )
    add(
        id="trig-limit", anchor="(23)",
        lhs="n*sin(n*z+y)/sin(n*z)",
        rhs="sum(k, 0, n-1, sin(z+y-k*pi/n)/sin(z-k*pi/n))",
        vars="z in real, y in real", params="n in 1..12",
        where="abs(sin(n*z)) > 0.2", compare="absolute",
    )
    add(
        id="trig-limit-n2", anchor="(23)",
        lhs="n*sin(n*z+y)/sin(n*z)",
        rhs="sin(z+y)/sin(z) + sin(z+y-pi/2)/sin(z-pi/2)",
        vars="z = pi/3, y = pi/6", params="n in 2..2", compare="absolute",
    )
    add(
        id="jacobi-6", anchor="(jacobi:6)",
        lhs=f"exp_i(2*m*z)*n*dtheta1(0|n*tau)*theta2(n*z+m*pi*tau+y|n*tau)*theta2(y|tau)"
            f"/({T1P}*theta2(y+m*pi*tau|n*tau)*theta1(n*z|n*tau))",
        rhs=f"sum(k, 0, n-1, exp_i(2*m*k*pi/n)*theta2(z+y-k*pi/n|tau)/theta1(z-k*pi/n|tau))",
        vars="z in cell, y in cell", params="n in 2..6; m in -4..4",
        avoid="n*z|n*tau, y+m*pi*tau-pi/2|n*tau",
    )
    add(
        id="jacobi-7", anchor="(jacobi:7)",
        lhs="exp_i(2*m*z)*n*dtheta1(0|n*tau)*theta1(n*z+m*pi*tau|n*tau)"
            "/(theta1(m*pi*tau|n*tau)*theta1(n*z|n*tau))",
        rhs="sum(k, 0, n-1, exp_i(2*m*k*pi/n)*dtheta1(z-k*pi/n|tau)/theta1(z-k*pi/n|tau))",
        vars="z in cell", params="n in 2..6; m in -4..4", where="m % n != 0",
        avoid="n*z|n*tau",
    )
    add(
        id="jacobi-8", anchor="Theorem 3.5, (jacobi:8)",
        lhs=f"n*dtheta1(0|n*tau)*theta1(z+y/n|tau)^n*theta1(y|tau)/({T1P}*theta1(n*z|n*tau))",
        rhs="sum(k, 0, n-1, (-1)^k*theta1(z+y-k*pi/n|tau)*theta1((y+k*pi)/n|tau)^n/theta1(z-k*pi/n|tau))",
        vars="z in cell, y in cell", params="n in 1..9 odd",
        avoid="n*z|n*tau",
    )
    add(
        id="vanishing-jacobi9", anchor="(jacobi:9)",
        lhs="sum(k, 0, n-1, (-1)^k*exp_i(2*k*pi/n)*theta1((k*pi+pi*tau)/n|tau)^n)",
        rhs="0", params="n in 1..9 odd", compare="terms",
    )
    add(
        id="jacobi-10", anchor="Theorem 3.6, (jacobi:10)",
        lhs=f"exp_i(2*m*z)*n*dtheta1(0|n*tau)*theta3(y|tau)*theta3(n*z+y+m*pi*tau|n*tau)"
            f"/({T1P}*theta3(y+m*pi*tau|n*tau)*theta1(n*z|n*tau))",
        rhs="sum(k, 0, n-1, (-1)^k*exp_i(2*k*m*pi/n)*theta3(z+y-k*pi/n|tau)/theta1(z-k*pi/n|tau))",
        vars="z in cell, y in cell", params="n in 1..9 odd; m in -4..4",
        avoid="n*z|n*tau, y+m*pi*tau-pi/2-n*pi*tau/2|n*tau",
    )
    add(
        id="jacobi-11", anchor="(jacobi:11)",
        lhs=f"exp_i(2*m*z)*n*dtheta1(0|n*tau)*theta4(y|tau)*theta4(n*z+y+m*pi*tau|n*tau)"
            f"/({T1P}*theta4(y+m*pi*tau|n*tau)*theta1(n*z|n*tau))",
        rhs="sum(k, 0, n-1, (-1)^k*exp_i(2*k*m*pi/n)*theta4(z+y-k*pi/n|tau)/theta1(z-k*pi/n|tau))",
        vars="z in cell, y in cell", params="n in 1..9 odd; m in -4..4",
        avoid="n*z|n*tau, y+m*pi*tau-n*pi*tau/2|n*tau",
    )
    add(
        id="jacobi-12", anchor="(jacobi:12)",
        lhs=f"(-1)^(m+(n-1)/2)*n*exp_i(2*m*z)*dtheta1(0|n*tau)*theta3(y|tau)*theta1(n*z+y+m*pi*tau|n*tau)"
            f"/({T1P}*theta3(y+m*pi*tau|n*tau)*theta3(n*z|n*tau))",
        rhs="sum(k, 0, n-1, (-1)^k*exp_i(2*k*m*pi/n)*theta1(z+y-k*pi/n|tau)/theta3(z-k*pi/n|tau))",
        vars="z in cell, y in cell", params="n in 1..9 odd; m in -4..4",
        avoid="n*z-pi/2-n*pi*tau/2|n*tau, y+m*pi*tau-pi/2-n*pi*tau/2|n*tau",
    )
    add(
        id="jacobi-13", anchor="Theorem 3.7, (jacobi:13)",
        lhs=f"dtheta1(0|tau/n)*theta1(z+y/n|tau/n)*theta1(y|tau)"
            f"/({T1P}*theta1(z|tau/n)*theta1(y/n|tau/n))",
        rhs="sum(k, 0, n-1, exp_i(-2*k*y/n)*theta1(z+y-k*pi*tau/n|tau)/theta1(z-k*pi*tau/n|tau))",
        vars="z in cell, y in cell", params="n in 1..9 odd",
        avoid="z|tau/n, y/n|tau/n",
    )
    add(
        id="jacobi-14", anchor="Theorem 3.8, (jacobi:14)",
        lhs=f"dtheta1(0|tau/n)*theta1(z+y/n|tau)^n*theta1(y|tau)/({T1P}*theta1(z|tau/n))",
        rhs="sum(k, 0, n-1, (-1)^k*theta1((y+k*pi*tau)/n|tau)^n"
            "*theta1(z+y-k*pi*tau/n|tau)/theta1(z-k*pi*tau/n|tau)*q^(k^2/(2*n)))",
        vars="z in cell, y in cell", params="n in 1..9 odd",
        avoid="z|tau/n",
    )
    add(
        id="vanishing-jacobi15", anchor="(jacobi:15)",
        lhs="sum(k, 0, n-1, (-1)^k*theta1((pi+k*pi*tau)/n|tau)^n*q^(k^2/(2*n)))",
        rhs="0", params="n in 1..9 odd", compare="terms",
    )
    # ---- section 4: addition formulas --------------------------------------
    def wq(a):
        return f"theta1({a}|tau)^2*wp({a}|tau)/(theta1({a}-u|tau)*theta1({a}+u|tau))"

    add(
        id="add-6", anchor="Theorem 4.2, add:(6)",
        lhs=f"{wq('x')} - {wq('y')}",
        rhs="-theta1(u|tau)^2*theta1(x+y|tau)*theta1(x-y|tau)*wp(u|tau)"
            "/(theta1(x-u|tau)*theta1(x+u|tau)*theta1(y-u|tau)*theta1(y+u|tau))",
        vars="x in cell, y in cell, u in cell",
        avoid="x, y, u, x-u, x+u, y-u, y+u, x-y, x+y",
    )
    add(
        id="add-9", anchor="add:(9)",
        lhs="wp(x|tau) - wp(y|tau)",
        rhs=f"-{T1P}^2*theta1(x+y|tau)*theta1(x-y|tau)/(theta1(x|tau)^2*theta1(y|tau)^2)",
        vars="x in cell, y in cell", avoid="x, y, x-y, x+y",
    )
    add10_lhs = (
        "theta1(x+u+w|tau)*theta1(x-u|tau)*theta1(y+v+w|tau)*theta1(y-v|tau)"
        " - theta1(y+u+w|tau)*theta1(y-u|tau)*theta1(x+v+w|tau)*theta1(x-v|tau)"
    )
    add10_rhs = "theta1(x-y|tau)*theta1(x+y+w|tau)*theta1(u+v+w|tau)*theta1(u-v|tau)"
    add(
        id="add-10", anchor="Theorem 4.3, add:(10)", lhs=add10_lhs, rhs=add10_rhs,
        vars="x in cell, y in cell, u in cell, v in cell, w in cell", compare="terms",
    )
    add(
        id="add-10-w0", anchor="add:(10) with w = 0", lhs=add10_lhs, rhs=add10_rhs,
        vars="x in cell, y in cell, u in cell, v in cell, w = 0", compare="terms",
    )
    add(
        id="add-11", anchor="add:(11)",
        lhs="theta3(y+u+w|tau)*theta3(y-u|tau)*theta4(x+v+w|tau)*theta4(x-v|tau)"
            " - theta3(x+u+w|tau)*theta3(x-u|tau)*theta4(y+v+w|tau)*theta4(y-v|tau)",
        rhs="theta1(x-y|tau)*theta1(x+y+w|tau)*theta2(u+v+w|tau)*theta2(u-v|tau)",
        vars="x in cell, y in cell, u in cell, v in cell, w in cell", compare="terms",
    )
    winq = lambda a, b: (  # noqa: E731
        f"q^(1/4)*qpoch(q|tau)^2*theta1(3*{b}|3*tau)"
        f"*(exp_i(2*{a})*theta1(3*{a}+pi*tau|3*tau) + exp_i(-2*{a})*theta1(3*{a}-pi*tau|3*tau))"
    )
    winq_rhs = "theta1(x|tau)*theta1(y|tau)*theta1(x+y|tau)*theta1(x-y|tau)"
    add(
        id="winquist", anchor="Theorem 4.4",
        lhs=f"{winq('x', 'y')} - {winq('y', 'x')}", rhs=winq_rhs,
        vars="x in cell, y in cell", avoid="x, y, x+y, x-y",
    )
    # ---- section 5/6: elliptic decomposition and Kiepert --------------------
    add(
        id="elliptic-logderiv", anchor="Theorem 5.1, (ell:1)",
        lhs="dtheta1(z|tau)/theta1(z|tau) - dtheta4(z|tau)/theta4(z|tau)",
        rhs="i + dtheta1(z|tau)/theta1(z|tau) - dtheta1(z-pi*tau/2|tau)/theta1(z-pi*tau/2|tau)",
        vars="z in cell", avoid="z, z-pi*tau/2",
    )
    add(
        id="kiepert-2", anchor="Theorem 5.1, (Kiepert:2)",
        lhs=f"{at(F4_0, 'z')}/theta1(2*z|tau)", rhs=kiepert2_rhs(F4_0, F4_0_PRIME),
        vars="z in cell, u in cell, v in cell, w in cell", avoid="2*z",
    )
    add(
        id="kiepert-thm61", anchor="Theorem 6.1",
        lhs=f"{at(F4_0, 'z')} - {at(F4_0, '-z')}",
        rhs=f"{at(F4_0_PRIME, '0')}/{T1P}*theta1(2*z|tau)",
        vars="z in cell, u in cell, v in cell, w in cell",
    )
    add(
        id="kiepert-thm61-quintuple", anchor="Theorem 6.1, (Kiepert:4)",
        lhs=f"{at(F_QUINT, 'z')} - {at(F_QUINT, '-z')}",
        rhs="theta4(pi*tau/2|3*tau)*theta1(2*z|tau)",
        vars="z in cell", backends="numeric, formal",
    )
    add(
        id="kiepert-theta4-euler", anchor="(Kiepert:4)",
        lhs="theta4(pi*tau/2|3*tau)", rhs="q^(-1/24)*eta(tau)", backends="numeric, formal",
    )
    add(
        id="kiepert-4", anchor="(Kiepert:4)",
        lhs="sum(n, -12, 12, 2*(-1)^n*q^(n*(3*n+1)/2)*cos((6*n+1)*z))",
        rhs="q^(-1/24)*eta(tau)*theta1(2*z|tau)/theta1(z|tau)",
        vars="z in cell", avoid="z", backends="numeric, formal", order="10",
    )
    add(
        id="kiepert-5", anchor="(Kiepert:5)",
        lhs="dtheta1(z|tau)/theta1(z|tau)", rhs=f"cot(z) + 4*{lam('trig=sin', 'z')}",
        vars="z in cell", avoid="z", backends="numeric, formal",
    )
    add(
        id="kiepert-6", anchor="(Kiepert:6)",
        lhs="dtheta4(z|tau)/theta4(z|tau)", rhs=f"4*{lam('num_exponent=1/2, trig=sin', 'z')}",
        vars="z in cell(-0.3, 0.3)", backends="numeric, formal",
    )
    add(
        id="kiepert-7", anchor="Theorem 6.2, (Kiepert:7)",
        lhs=f"sin(z)*sin(2*z)/sin(5*z) - {lam('modulus=5, trig=sin', 'z')}",
        rhs="eta(5*tau)^2*theta1(z|tau)*theta1(2*z|tau)/(2*eta(tau)*theta1(5*z|5*tau))",
        vars="z in cell", avoid="5*z|5*tau", backends="numeric, formal",
    )
    add(
        id="kiepert-8", anchor="Theorem 6.2, (Kiepert:8)",
        lhs=lam("inner_modulus=5, trig=sin", "z"),
        rhs="eta(tau)^2*theta1(z|5*tau)*theta1(2*z|5*tau)/(2*eta(5*tau)*theta1(z|tau))",
        vars="z in cell", avoid="z", backends="numeric, formal",
    )
    add(
        id="kiepert-9", anchor="(Kiepert:9)",
        lhs=f"1 - 5*{lam('modulus=5, weight=1')}", rhs="eta(tau)^5/eta(5*tau)",
        backends="numeric, formal",
    )
    add(
        id="kiepert-10", anchor="(Kiepert:10)",
        lhs=lam("modulus=5, den_power=2"), rhs="eta(5*tau)^5/eta(tau)",
        backends="numeric, formal",
    )
    add(
        id="kiepert-10-lemma", anchor="(Kiepert:10), proof",
        lhs=lam("inner_modulus=5, weight=1"), rhs=lam("modulus=5, den_power=2"),
        backends="numeric, formal",
    )
    add(
        id="kiepert-11", anchor="(Kiepert:11)",
        lhs=f"cos(z)*sin(2*z)/cos(5*z) + {lam('modulus=5, twist=alt, trig=sin', 'z')}",
        rhs="eta(5*tau)^2*theta2(z|tau)*theta1(2*z|tau)/(2*eta(tau)*theta2(5*z|5*tau))",
        vars="z in cell", avoid="5*z-pi/2|5*tau", backends="numeric, formal",
    )
    add(
        id="kiepert-12", anchor="(Kiepert:12)",
        lhs=f"1 + {lam('modulus=5, twist=alt, weight=1')}",
        rhs="eta(tau)*eta(2*tau)^2*eta(5*tau)^3/eta(10*tau)^2",
        backends="numeric, formal",
    )
    add(
        id="kiepert-13", anchor="(Kiepert:13), weight-0 form",
        lhs=f"1 + {lam('modulus=15, twist=alt')}",
        rhs="eta(tau)*eta(6*tau)*eta(10*tau)*eta(15*tau)/(eta(2*tau)*eta(30*tau))",
        backends="numeric, formal",
    )
    add(
        id="kiepert-14", anchor="(Kiepert:14), weight-0 form",
        lhs=f"1 + {lam('modulus=5, twist=chi4')}",
        rhs="eta(2*tau)*eta(4*tau)*eta(5*tau)*eta(10*tau)/(eta(tau)*eta(20*tau))",
        backends="numeric, formal",
    )
    add(
        id="kiepert-15", anchor="(Kiepert:15)",
        lhs=lam("twist=alt1, inner_modulus=5, trig=sin", "z"),
        rhs="eta(tau)^2*theta2(z|5*tau)*theta1(2*z|5*tau)/(2*eta(5*tau)*theta2(z|tau))",
        vars="z in cell", avoid="z-pi/2", backends="numeric, formal",
    )
    add(
        id="kiepert-16", anchor="(Kiepert:16)",
        lhs=lam("modulus=3, twist=alt1, inner_modulus=5"),
        rhs="eta(2*tau)*eta(3*tau)*eta(5*tau)*eta(30*tau)/(eta(6*tau)*eta(10*tau))",
        backends="numeric, formal",
    )
    add(
        id="kiepert-17", anchor="(Kiepert:17), corrected eta quotient",
        lhs=lam("twist=alt1, weight=1, inner_modulus=5"),
        rhs="eta(tau)^3*eta(5*tau)*eta(10*tau)^2/eta(2*tau)^2",
        backends="numeric, formal",
    )
    add(
        id="kiepert-18", anchor="Theorem 6.3, (Kiepert:18)",
        lhs=lam("modulus=5, den_exponent=2, trig=sin", "z"),
        rhs="eta(10*tau)^2*theta4(z|2*tau)*theta1(2*z|2*tau)/(2*eta(2*tau)*theta4(5*z|10*tau))",
        vars="z in cell", avoid="5*z-5*pi*tau|10*tau", backends="numeric, formal",
    )
    add(
        id="kiepert-19", anchor="(Kiepert:19)",
        lhs=lam("modulus=5, weight=1, den_exponent=2"),
        rhs="eta(tau)^2*eta(2*tau)*eta(10*tau)^3/eta(5*tau)^2",
        backends="numeric, formal",
    )
    add(
        id="kiepert-20", anchor="(Kiepert:20), weight-0 form",
        lhs=lam("modulus=15, den_exponent=2"),
        rhs="eta(2*tau)*eta(3*tau)*eta(5*tau)*eta(30*tau)/(eta(tau)*eta(15*tau))",
        backends="numeric, formal",
    )
    add(
        id="kiepert-21", anchor="(Kiepert:21)",
        lhs=lam("modulus=5, twist=chi4, den_exponent=2"),
        rhs="eta(4*tau)^4*eta(10*tau)^2*eta(40*tau)/(eta(2*tau)^2*eta(8*tau)*eta(20*tau)^2)",
        backends="numeric, formal",
    )
    add(
        id="kiepert-22", anchor="Theorem 6.4, (Kiepert:22)",
        lhs=f"sin(z)^3/(3*sin(3*z)) - {lam('modulus=3, trig=sin2, freq=1', 'z')}",
        rhs="theta1(z|tau)^3/(12*theta1(3*z|3*tau))",
        vars="z in cell", avoid="3*z|3*tau", backends="numeric, formal",
    )
    logd = lambda a: f"dtheta1({a}|tau)/theta1({a}|tau)"  # noqa: E731
    add(
        id="kiepert-23", anchor="(Kiepert:23)",
        lhs="2*theta1(z|tau)^3/(sqrt(3)*theta1(3*z|3*tau))",
        rhs=f"-2*{logd('pi/3')} + {logd('z+pi/3')} - {logd('z-pi/3')}",
        vars="z in cell", avoid="3*z|3*tau",
    )
    add(
        id="kiepert-24", anchor="(Kiepert:24)",
        lhs=f"1 - 9*{lam('modulus=3, weight=2')}", rhs="eta(tau)^9/eta(3*tau)^3",
        backends="numeric, formal",
    )
    add(
        id="kiepert-26", anchor="(Kiepert:26)",
        lhs=logd("pi/3"), rhs="a(tau)/sqrt(3)",
    )
    add(
        id="kiepert-27", anchor="(Kiepert:27)",
        lhs="2*theta1(z|tau)^3/(sqrt(3)*theta1(3*z|3*tau))",
        rhs=f"-2/sqrt(3)*a(tau) + {logd('z+pi/3')} - {logd('z-pi/3')}",
        vars="z in cell", avoid="3*z|3*tau",
    )
    add(
        id="kiepert-28", anchor="(Kiepert:28)",
        lhs="2*theta1(z+pi/3|tau)^3/(sqrt(3)*theta1(3*z|3*tau))",
        rhs=f"2/sqrt(3)*a(tau) - {logd('z-pi/3')} + {logd('z')}",
        vars="z in cell", avoid="3*z|3*tau",
    )
    add(
        id="kiepert-29", anchor="(Kiepert:29)",
        lhs="2*theta1(z-pi/3|tau)^3/(sqrt(3)*theta1(3*z|3*tau))",
        rhs=f"2/sqrt(3)*a(tau) + {logd('z+pi/3')} - {logd('z')}",
        vars="z in cell", avoid="3*z|3*tau",
    )
    add(
        id="kiepert-30", anchor="(Kiepert:30)",
        lhs="theta1(z+pi/3|tau)^3 + theta1(z-pi/3|tau)^3 - theta1(z|tau)^3",
        rhs="3*a(tau)*theta1(3*z|3*tau)",
        vars="z in cell",
    )
    # ---- Shen --------------------------------------------------------------
    add(
        id="shen-1", anchor="Theorem 6.5, (Shen:1)",
        lhs=f"cot(x) + cot(y) - 4*({lam('den_sign=-1, trig=sin', 'x')} + {lam('den_sign=-1, trig=sin', 'y')})",
        rhs="2*theta3(0|tau)*theta4(0|tau)*theta1(x+y|2*tau)*theta4(x-y|2*tau)/(theta1(x|tau)*theta1(y|tau))",
        vars="x in cell, y in cell", avoid="x, y", backends="numeric, formal",
    )
    cos_half = "num_exponent=1/2, den_sign=-1, trig=cos"
    add(
        id="shen-2", anchor="Theorem 6.6, (Shen:2), both factors at 2 tau",
        lhs=f"1 + 2*({lam(cos_half, 'x')} + {lam(cos_half, 'y')})",
        rhs="theta3(0|tau)*theta4(0|tau)*theta4(x+y|2*tau)*theta4(x-y|2*tau)/(theta4(x|tau)*theta4(y|tau))",
        vars="x in cell(-0.3, 0.3), y in cell(-0.3, 0.3)", backends="numeric, formal", order="12",
    )
    add(
        id="shen-3", anchor="Theorem 6.6, (Shen:3)",
        lhs=f"{lam(cos_half, 'x')} - {lam(cos_half, 'y')}",
        rhs="-theta3(0|tau)*theta4(0|tau)*theta1(x+y|2*tau)*theta1(x-y|2*tau)/(2*theta4(x|tau)*theta4(y|tau))",
        vars="x in cell(-0.3, 0.3), y in cell(-0.3, 0.3)", avoid="x-y, x+y",
        backends="numeric, formal",
    )
    odd_half = "num_exponent=1/2, den_exponent=1/2, trig=sin, freq=1, odd_only=true"
    add(
        id="shen-4", anchor="Theorem 6.6, (Shen:4)",
        lhs=f"csc(x) + csc(y) + 4*({lam(odd_half, 'x')} + {lam(odd_half, 'y')})",
        rhs="theta2(0|tau)*theta3(0|tau)*theta1((x+y)/2|tau/2)*theta2((x-y)/2|tau/2)"
            "/(theta1(x|tau)*theta1(y|tau))",
        vars="x in cell, y in cell", avoid="x, y",
    )
    odd_quarter = "num_exponent=1/4, den_exponent=1/2, trig=sin, freq=1, odd_only=true"
    add(
        id="shen-jell12", anchor="Theorem 6.6, the fourth seems to be new",
        lhs=f"4*({lam(odd_quarter, 'x')} + {lam(odd_quarter, 'y')})",
        rhs="theta2(0|tau)*theta3(0|tau)*theta1((x+y)/2|tau/2)*theta2((x-y)/2|tau/2)"
            "/(theta4(x|tau)*theta4(y|tau))",
        vars="x in cell(-0.2, 0.2), y in cell(-0.2, 0.2)", avoid="x+y",
    )
    return R


def _negative() -> list[dict]:
    winq_lhs = next(r for r in _records() if r["id"] == "winquist")
    return [
        dict(winq_lhs, id="negative-winquist-perturbed", anchor="perturbed Theorem 4.4",
             rhs=f"({winq_lhs['rhs']})*(1 + 1/1000000)", negative="true"),
        dict(id="negative-kiepert-9-eta4", anchor="perturbed (Kiepert:9)",
             lhs=f"1 - 5*{lam('modulus=5, weight=1')}",
             rhs="q^(1/24)*eta(tau)^4/eta(5*tau)",
             backends="numeric, formal", negative="true"),
    ]


@lru_cache(maxsize=None)
def _build(negative: bool) -> tuple[IdentityRecord, ...]:
    fields = _negative() if negative else _records()
    return tuple(record_from_fields({k: str(v) for k, v in f.items()}) for f in fields)


def builtin_catalog() -> list[IdentityRecord]:
    """Every identity of the built-in catalog, sorted by id."""
    return sorted(_build(False), key=lambda r: r.id)


def negative_controls() -> list[IdentityRecord]:
    """Deliberately perturbed records; each backend must reject them."""
    return sorted(_build(True), key=lambda r: r.id)
