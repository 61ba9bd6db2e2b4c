//! Pixel rectangles and sizes, with the `x,y,w,h` / `WxH` text forms used on
//! the command line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self { x, y, width, height }
    }

    pub fn right(&self) -> usize {
        self.x + self.width
    }

    pub fn bottom(&self) -> usize {
        self.y + self.height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn fits_within(&self, size: Size) -> bool {
        self.right() <= size.width && self.bottom() <= size.height
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x, self.y, self.width, self.height)
    }
}

impl FromStr for Rect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<_> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
        match parts.as_slice() {
            [Ok(x), Ok(y), Ok(w), Ok(h)] => Ok(Rect::new(*x, *y, *w, *h)),
            _ => Err(format!("expected x,y,w,h with non-negative integers, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Size {
    pub width: usize,
    pub height: usize,
}

impl Size {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub fn full_rect(&self) -> Rect {
        Rect::new(0, 0, self.width, self.height)
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
        let w = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
        let h = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
        Ok(Size::new(w, h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("0,0,112,16".parse::<Rect>().unwrap(), Rect::new(0, 0, 112, 16));
        assert_eq!("480x360".parse::<Size>().unwrap(), Size::new(480, 360));
        assert!("1,2,3".parse::<Rect>().is_err());
        assert!("480".parse::<Size>().is_err());
    }

    #[test]
    fn bounds() {
        let frame = Size::new(480, 360);
        assert!(Rect::new(0, 0, 112, 16).fits_within(frame));
        assert!(!Rect::new(400, 0, 112, 16).fits_within(frame));
        assert!(Rect::new(0, 0, 10, 10).intersects(&Rect::new(9, 9, 2, 2)));
        assert!(!Rect::new(0, 0, 10, 10).intersects(&Rect::new(10, 0, 2, 2)));
    }
}
