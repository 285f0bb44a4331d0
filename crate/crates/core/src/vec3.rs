//! Small fixed-size vector helpers shared by every module.

use num_complex::Complex64;

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];

pub const CZERO3: CVec3 = [Complex64 { re: 0.0, im: 0.0 }; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn normalized(a: &Vec3) -> Vec3 {
    let n = norm(a);
    scale(a, 1.0 / n)
}

/// Real vector times complex scalar.
#[inline]
pub fn rc(a: &Vec3, s: Complex64) -> CVec3 {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn cscale(a: &CVec3, s: Complex64) -> CVec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn cadd(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn csub(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Bilinear (non-conjugating) product of a real and a complex vector.
#[inline]
pub fn rdot(a: &Vec3, b: &CVec3) -> Complex64 {
    b[0] * a[0] + b[1] * a[1] + b[2] * a[2]
}

/// Hermitian product `a · conj(b)`.
#[inline]
pub fn hdot(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()
}

#[inline]
pub fn cnorm_sqr(a: &CVec3) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()
}

#[inline]
pub fn cnorm(a: &CVec3) -> f64 {
    cnorm_sqr(a).sqrt()
}

/// Real unit vector crossed with a complex vector.
#[inline]
pub fn rcross(a: &Vec3, b: &CVec3) -> CVec3 {
    [
        b[2] * a[1] - b[1] * a[2],
        b[0] * a[2] - b[2] * a[0],
        b[1] * a[0] - b[0] * a[1],
    ]
}

/// Removes the component of `v` along the unit vector `n`.
#[inline]
pub fn tangential(n: &Vec3, v: &CVec3) -> CVec3 {
    let r = rdot(n, v);
    [v[0] - r * n[0], v[1] - r * n[1], v[2] - r * n[2]]
}

pub fn is_finite3(a: &Vec3) -> bool {
    a.iter().all(|x| x.is_finite())
}

pub fn is_finite_c3(a: &CVec3) -> bool {
    a.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}
