//! Undirected workspace graphs and the community grid/scenario formats.

use crate::error::{Error, Result};

/// Undirected graph over dense integer vertex ids.
///
/// Grid-derived graphs map cell `(r, c)` to id `r * width + c`; blocked
/// cells keep their id but are absent from the graph, so `vertex_count`
/// can be smaller than the id range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    exists: Vec<bool>,
    grid: Option<GridMeta>,
}

/// Grid provenance for graphs loaded from map files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMeta {
    pub width: u32,
    pub height: u32,
    /// Row-major passable mask, one entry per cell.
    pub passable: Vec<bool>,
}

impl GridMeta {
    /// Renders the mask back into the grid-map text format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("type octile\n");
        out.push_str(&format!("height {}\n", self.height));
        out.push_str(&format!("width {}\n", self.width));
        out.push_str("map\n");
        for r in 0..self.height as usize {
            for c in 0..self.width as usize {
                out.push(if self.passable[r * self.width as usize + c] {
                    '.'
                } else {
                    '@'
                });
            }
            out.push('\n');
        }
        out
    }

    pub fn cell_vertex(&self, x: u32, y: u32) -> Result<u32> {
        if x >= self.width || y >= self.height {
            return Err(Error::CellUnusable { x, y });
        }
        let id = y * self.width + x;
        if !self.passable[id as usize] {
            return Err(Error::CellUnusable { x, y });
        }
        Ok(id)
    }
}

impl Graph {
    /// Graph with `n` isolated vertices ids `0..n`.
    pub fn with_vertices(n: u32) -> Self {
        Graph {
            adj: vec![Vec::new(); n as usize],
            exists: vec![true; n as usize],
            grid: None,
        }
    }

    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for w in [u, v] {
            if !self.contains_vertex(w) {
                return Err(Error::BadVertex(w));
            }
        }
        insert_sorted(&mut self.adj[u as usize], v);
        insert_sorted(&mut self.adj[v as usize], u);
        Ok(())
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        (v as usize) < self.exists.len() && self.exists[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.contains_vertex(u) && self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Number of vertices present in the graph.
    pub fn vertex_count(&self) -> usize {
        self.exists.iter().filter(|&&e| e).count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Upper bound (exclusive) on vertex ids.
    pub fn id_bound(&self) -> u32 {
        self.exists.len() as u32
    }

    /// Neighbors of `v`, sorted ascending by id.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    /// Iterates each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| {
            ns.iter()
                .filter(move |&&v| (u as u32) < v)
                .map(move |&v| (u as u32, v))
        })
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.exists
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(|(i, _)| i as u32)
    }

    pub fn grid(&self) -> Option<&GridMeta> {
        self.grid.as_ref()
    }
}

fn insert_sorted(list: &mut Vec<u32>, v: u32) {
    if let Err(pos) = list.binary_search(&v) {
        list.insert(pos, v);
    }
}

fn cell_passable(c: char) -> Result<bool> {
    match c {
        '.' | 'G' => Ok(true),
        '@' | 'O' | 'T' => Ok(false),
        other => Err(Error::MapCell(other)),
    }
}

/// Parses a grid-map file into a four-connected graph over passable cells.
pub fn load_map(text: &str) -> Result<Graph> {
    let mut lines = text.lines();
    let mut height: Option<usize> = None;
    let mut width: Option<usize> = None;
    let mut saw_type = false;
    loop {
        let line = lines
            .next()
            .ok_or_else(|| Error::MapHeader("missing `map` line".into()))?;
        let line = line.trim_end();
        if line == "map" {
            break;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next()) {
            (Some("type"), Some(_)) => saw_type = true,
            (Some("height"), Some(h)) => {
                height = Some(h.parse().map_err(|_| {
                    Error::MapHeader(format!("bad height {h:?}"))
                })?)
            }
            (Some("width"), Some(w)) => {
                width = Some(w.parse().map_err(|_| {
                    Error::MapHeader(format!("bad width {w:?}"))
                })?)
            }
            _ => return Err(Error::MapHeader(format!("unexpected line {line:?}"))),
        }
    }
    let _ = saw_type;
    let height = height.ok_or_else(|| Error::MapHeader("missing height".into()))?;
    let width = width.ok_or_else(|| Error::MapHeader("missing width".into()))?;

    let mut passable = Vec::with_capacity(height * width);
    let mut rows = 0usize;
    for line in lines {
        let line = line.trim_end_matches(['\r', ' ']);
        if line.is_empty() {
            continue;
        }
        if line.chars().count() != width {
            return Err(Error::MapRowWidth {
                row: rows,
                got: line.chars().count(),
                want: width,
            });
        }
        for c in line.chars() {
            passable.push(cell_passable(c)?);
        }
        rows += 1;
    }
    if rows != height {
        return Err(Error::MapRowCount { got: rows, want: height });
    }

    let mut adj = vec![Vec::new(); height * width];
    let mut exists = vec![false; height * width];
    for r in 0..height {
        for c in 0..width {
            let id = r * width + c;
            if !passable[id] {
                continue;
            }
            exists[id] = true;
            // 4-connectivity; only look right/down so each edge is added once.
            if c + 1 < width && passable[id + 1] {
                adj[id].push((id + 1) as u32);
                adj[id + 1].push(id as u32);
            }
            if r + 1 < height && passable[id + width] {
                adj[id].push((id + width) as u32);
                adj[id + width].push(id as u32);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Ok(Graph {
        adj,
        exists,
        grid: Some(GridMeta {
            width: width as u32,
            height: height as u32,
            passable,
        }),
    })
}

/// Parses the first `n` records of a version-1 scenario file into
/// `(start, goal)` vertex pairs, validated against the loaded map.
pub fn load_scenario(text: &str, n: usize, graph: &Graph) -> Result<Vec<(u32, u32)>> {
    let grid = graph
        .grid()
        .ok_or_else(|| Error::ScenHeader("graph has no grid metadata".into()))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::ScenHeader("empty file".into()))?;
    if !header.trim_start().starts_with("version") {
        return Err(Error::ScenHeader(format!("expected version line, got {header:?}")));
    }

    let mut pairs = Vec::new();
    for (idx, line) in lines {
        if pairs.len() == n {
            break;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 8 {
            return Err(Error::ScenRecord {
                line: idx + 1,
                reason: format!("expected at least 8 fields, got {}", fields.len()),
            });
        }
        let coord = |i: usize| -> Result<u32> {
            fields[i].parse().map_err(|_| Error::ScenRecord {
                line: idx + 1,
                reason: format!("bad coordinate {:?}", fields[i]),
            })
        };
        let (sx, sy, gx, gy) = (coord(4)?, coord(5)?, coord(6)?, coord(7)?);
        pairs.push((grid.cell_vertex(sx, sy)?, grid.cell_vertex(gx, gy)?));
    }
    if pairs.len() < n {
        return Err(Error::ScenTooFew { got: pairs.len(), want: n });
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(body: &str) -> String {
        let rows: Vec<&str> = body.split('|').collect();
        format!(
            "type octile\nheight {}\nwidth {}\nmap\n{}\n",
            rows.len(),
            rows[0].len(),
            rows.join("\n")
        )
    }

    #[test]
    fn two_by_two_all_passable() {
        let g = load_map(&map("..|..")).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn blocked_cell_severs_row() {
        let g = load_map(&map(".@.")).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 0);
        assert!(g.contains_vertex(0));
        assert!(!g.contains_vertex(1));
        assert!(g.contains_vertex(2));
    }

    #[test]
    fn empty_16x16_edge_count() {
        let row = ".".repeat(16);
        let body = vec![row.as_str(); 16].join("|");
        let g = load_map(&map(&body)).unwrap();
        assert_eq!(g.vertex_count(), 256);
        // 2 * W * (W - 1) edges on an empty W x W four-connected grid.
        assert_eq!(g.edge_count(), 480);
    }

    #[test]
    fn round_trip_mask() {
        let text = map(".@.|...|@..");
        let g = load_map(&text).unwrap();
        let again = load_map(&g.grid().unwrap().render()).unwrap();
        assert_eq!(g.grid().unwrap().passable, again.grid().unwrap().passable);
    }

    #[test]
    fn neighbor_lists_sorted_and_symmetric() {
        let g = load_map(&map("...|...|...")).unwrap();
        for v in g.vertices() {
            let ns = g.neighbors(v);
            assert!(ns.windows(2).all(|w| w[0] < w[1]));
            for &u in ns {
                assert!(g.neighbors(u).contains(&v));
            }
        }
    }

    #[test]
    fn malformed_header_rejected() {
        assert!(matches!(load_map("height 2\nmap\n..\n..\n"), Err(Error::MapHeader(_))));
        assert!(matches!(
            load_map("type octile\nheight 2\nwidth 2\nmap\n..\n"),
            Err(Error::MapRowCount { .. })
        ));
        assert!(matches!(
            load_map("type octile\nheight 1\nwidth 2\nmap\n.x\n"),
            Err(Error::MapCell('x'))
        ));
    }

    fn scen(records: &[(u32, u32, u32, u32)]) -> String {
        let mut s = String::from("version 1\n");
        for (sx, sy, gx, gy) in records {
            s.push_str(&format!("0\tdummy.map\t3\t1\t{sx}\t{sy}\t{gx}\t{gy}\t1.0\n"));
        }
        s
    }

    #[test]
    fn scenario_basic() {
        let g = load_map(&map("...")).unwrap();
        let pairs = load_scenario(&scen(&[(0, 0, 2, 0)]), 1, &g).unwrap();
        assert_eq!(pairs, vec![(0, 2)]);
        assert_eq!(load_scenario(&scen(&[]), 0, &g).unwrap(), vec![]);
    }

    #[test]
    fn scenario_blocked_cell_rejected() {
        let g = load_map(&map(".@.")).unwrap();
        assert!(matches!(
            load_scenario(&scen(&[(0, 0, 1, 0)]), 1, &g),
            Err(Error::CellUnusable { x: 1, y: 0 })
        ));
    }

    #[test]
    fn scenario_too_few_records() {
        let g = load_map(&map("...")).unwrap();
        assert!(matches!(
            load_scenario(&scen(&[(0, 0, 2, 0)]), 2, &g),
            Err(Error::ScenTooFew { got: 1, want: 2 })
        ));
    }
}
